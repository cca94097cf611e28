#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace mdchase {

using TupleId = std::int64_t;

// A cell value: either a ground constant (a string) or a fresh constant.
// Fresh constants model update values not drawn from the data; they are
// pairwise distinct, never equal to any ground constant, and dissimilar to
// everything but themselves under every similarity predicate.
class Value {
public:
    Value() : fresh_(false), id_(0) {}

    static Value ground(std::string text) {
        Value v;
        v.fresh_ = false;
        v.text_ = std::move(text);
        return v;
    }

    static Value fresh(std::uint64_t id) {
        Value v;
        v.fresh_ = true;
        v.id_ = id;
        return v;
    }

    bool is_fresh() const { return fresh_; }
    bool is_ground() const { return !fresh_; }

    // Ground text; meaningless for fresh values.
    const std::string& text() const { return text_; }
    std::uint64_t fresh_id() const { return id_; }

    // Ground values print as-is, fresh ones as "_:<k>". Input CSV values are
    // always ground, so the prefix cannot collide on read.
    std::string display() const {
        return fresh_ ? "_:" + std::to_string(id_) : text_;
    }

    friend bool operator==(const Value& a, const Value& b) {
        if (a.fresh_ != b.fresh_) return false;
        return a.fresh_ ? a.id_ == b.id_ : a.text_ == b.text_;
    }

    // Ground values order lexicographically and precede all fresh values.
    friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
        if (a.fresh_ != b.fresh_) return a.fresh_ <=> b.fresh_;
        if (a.fresh_) return a.id_ <=> b.id_;
        return a.text_ <=> b.text_;
    }

private:
    bool fresh_;
    std::string text_;
    std::uint64_t id_;
};

}  // namespace mdchase
