#pragma once

#include <algorithm>
#include <compare>
#include <set>
#include <string>
#include <vector>

#include "mdchase/error.hpp"
#include "mdchase/value.hpp"

namespace mdchase {

// A relation-qualified attribute, e.g. R[B].
struct AttrRef {
    std::string rel;
    std::string attr;

    auto operator<=>(const AttrRef&) const = default;

    std::string str() const { return rel + "[" + attr + "]"; }
};

using AttrSet = std::set<AttrRef>;

// A cell address: tuple id plus qualified attribute.
struct Position {
    TupleId tid = 0;
    AttrRef attr;

    auto operator<=>(const Position&) const = default;

    std::string str() const {
        return "(" + attr.rel + ":t" + std::to_string(tid) + "," + attr.attr + ")";
    }
};

struct RelationDef {
    std::string name;
    std::vector<std::string> attrs;

    // -1 when absent.
    int attr_index(const std::string& a) const {
        auto it = std::find(attrs.begin(), attrs.end(), a);
        return it == attrs.end() ? -1 : static_cast<int>(it - attrs.begin());
    }
};

class Schema {
public:
    Schema() = default;

    explicit Schema(std::vector<RelationDef> relations) : relations_(std::move(relations)) {
        std::sort(relations_.begin(), relations_.end(),
                  [](const RelationDef& a, const RelationDef& b) { return a.name < b.name; });
        std::set<std::string> names;
        for (const auto& r : relations_) {
            if (!names.insert(r.name).second)
                throw structural_error("duplicate relation name '" + r.name + "' in schema");
            std::set<std::string> attrs;
            for (const auto& a : r.attrs)
                if (!attrs.insert(a).second)
                    throw structural_error("duplicate attribute '" + a + "' in relation '" + r.name + "'");
        }
    }

    const std::vector<RelationDef>& relations() const { return relations_; }

    const RelationDef* find(const std::string& rel) const {
        for (const auto& r : relations_)
            if (r.name == rel) return &r;
        return nullptr;
    }

    const RelationDef& require(const std::string& rel) const {
        const RelationDef* r = find(rel);
        if (!r) throw structural_error("unknown relation '" + rel + "'");
        return *r;
    }

    int attr_index(const AttrRef& a) const {
        const RelationDef* r = find(a.rel);
        return r ? r->attr_index(a.attr) : -1;
    }

    bool has_attr(const AttrRef& a) const { return attr_index(a) >= 0; }

private:
    std::vector<RelationDef> relations_;
};

}  // namespace mdchase
