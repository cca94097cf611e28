#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mdchase/error.hpp"
#include "mdchase/schema.hpp"
#include "mdchase/value.hpp"

namespace mdchase {

// A tuple-identified database instance. Tuple ids are surrogate keys that no
// chase step ever changes; steps only update cell values.
class Instance {
public:
    using Tuples = std::map<TupleId, std::vector<Value>>;

    Instance() : schema_(std::make_shared<Schema>()) {}

    explicit Instance(std::shared_ptr<const Schema> schema) : schema_(std::move(schema)) {
        for (const auto& r : schema_->relations()) rels_[r.name];
    }

    const Schema& schema() const { return *schema_; }
    std::shared_ptr<const Schema> schema_ptr() const { return schema_; }

    void insert(const std::string& rel, TupleId tid, std::vector<Value> tuple) {
        const RelationDef& def = schema_->require(rel);
        if (tuple.size() != def.attrs.size())
            throw structural_error("tuple arity " + std::to_string(tuple.size()) +
                                   " does not match relation '" + rel + "' arity " +
                                   std::to_string(def.attrs.size()));
        auto [it, fresh] = rels_[rel].emplace(tid, std::move(tuple));
        if (!fresh)
            throw structural_error("duplicate tuple id " + std::to_string(tid) +
                                   " in relation '" + rel + "'");
    }

    const Tuples& tuples(const std::string& rel) const {
        auto it = rels_.find(rel);
        if (it == rels_.end()) throw structural_error("unknown relation '" + rel + "'");
        return it->second;
    }

    const std::map<std::string, Tuples>& relations() const { return rels_; }

    const Value& at(const Position& p) const {
        int idx = schema_->attr_index(p.attr);
        if (idx < 0) throw structural_error("unknown attribute " + p.attr.str());
        const Tuples& ts = tuples(p.attr.rel);
        auto it = ts.find(p.tid);
        if (it == ts.end())
            throw structural_error("unknown tuple id " + std::to_string(p.tid) +
                                   " in relation '" + p.attr.rel + "'");
        return it->second[static_cast<std::size_t>(idx)];
    }

    void set(const Position& p, Value v) {
        int idx = schema_->attr_index(p.attr);
        if (idx < 0) throw structural_error("unknown attribute " + p.attr.str());
        auto rit = rels_.find(p.attr.rel);
        if (rit == rels_.end()) throw structural_error("unknown relation '" + p.attr.rel + "'");
        auto it = rit->second.find(p.tid);
        if (it == rit->second.end())
            throw structural_error("unknown tuple id " + std::to_string(p.tid) +
                                   " in relation '" + p.attr.rel + "'");
        it->second[static_cast<std::size_t>(idx)] = std::move(v);
    }

    std::size_t tuple_count() const {
        std::size_t n = 0;
        for (const auto& [rel, ts] : rels_) n += ts.size();
        return n;
    }

    bool same_tids(const Instance& other) const {
        if (rels_.size() != other.rels_.size()) return false;
        for (auto a = rels_.begin(), b = other.rels_.begin(); a != rels_.end(); ++a, ++b) {
            if (a->first != b->first || a->second.size() != b->second.size()) return false;
            for (auto ta = a->second.begin(), tb = b->second.begin(); ta != a->second.end();
                 ++ta, ++tb)
                if (ta->first != tb->first) return false;
        }
        return true;
    }

    friend bool operator==(const Instance& a, const Instance& b) { return a.rels_ == b.rels_; }

private:
    std::shared_ptr<const Schema> schema_;
    std::map<std::string, Tuples> rels_;
};

// Exactly the positions whose values differ. Requires equal schemas and
// tid sets; the change count of the chase is the size of this set.
inline std::set<Position> diff(const Instance& original, const Instance& updated) {
    if (!original.same_tids(updated))
        throw structural_error("diff: instances have different relations or tuple ids");
    std::set<Position> changed;
    for (const auto& [rel, ts] : original.relations()) {
        const RelationDef& def = original.schema().require(rel);
        for (const auto& [tid, tuple] : ts) {
            const auto& other = updated.tuples(rel).at(tid);
            if (other.size() != tuple.size())
                throw structural_error("diff: arity mismatch in relation '" + rel + "'");
            for (std::size_t i = 0; i < tuple.size(); ++i)
                if (!(tuple[i] == other[i]))
                    changed.insert(Position{tid, AttrRef{rel, def.attrs[i]}});
        }
    }
    return changed;
}

inline std::size_t change_count(const Instance& original, const Instance& updated) {
    return diff(original, updated).size();
}

// The set of values appearing in one column.
inline std::set<Value> active_domain(const Instance& d, const AttrRef& attr) {
    int idx = d.schema().attr_index(attr);
    if (idx < 0) throw structural_error("unknown attribute " + attr.str());
    std::set<Value> vals;
    for (const auto& [tid, tuple] : d.tuples(attr.rel))
        vals.insert(tuple[static_cast<std::size_t>(idx)]);
    return vals;
}

}  // namespace mdchase
