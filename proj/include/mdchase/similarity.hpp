#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mdchase/error.hpp"
#include "mdchase/value.hpp"

namespace mdchase {

// Byte-level Levenshtein distance.
inline std::size_t levenshtein(const std::string& a, const std::string& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::size_t> row(m + 1);
    std::iota(row.begin(), row.end(), std::size_t{0});
    for (std::size_t i = 1; i <= n; ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            std::size_t cost = (a[i - 1] == b[j - 1]) ? diag : diag + 1;
            diag = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, cost});
        }
    }
    return row[m];
}

enum class SimKind { Equality, EditDistance, Table };

// A binary similarity predicate on values. Every validated spec is symmetric
// and subsumes equality. Transitivity is never assumed; the declared flag is
// consumed only by the static analyzer.
struct SimilaritySpec {
    std::string name;
    SimKind kind = SimKind::Equality;
    std::size_t threshold = 0;  // EditDistance only
    std::set<std::pair<std::string, std::string>> pairs;  // Table only
    bool transitive = false;
    bool validated = false;
};

inline SimilaritySpec equality_spec() {
    SimilaritySpec s;
    s.name = "eq";
    s.kind = SimKind::Equality;
    s.transitive = true;
    s.validated = true;
    return s;
}

// Symmetry and equality subsumption are enforced by construction: explicit
// tables are closed under swap and extended with the identity pair of every
// mentioned value. A table declared transitive is checked exhaustively.
inline SimilaritySpec validate_similarity(SimilaritySpec spec) {
    switch (spec.kind) {
        case SimKind::Equality:
            spec.transitive = true;
            break;
        case SimKind::EditDistance:
            // declared transitivity flag kept unverified
            break;
        case SimKind::Table: {
            std::set<std::pair<std::string, std::string>> closed;
            std::set<std::string> mentioned;
            for (const auto& [x, y] : spec.pairs) {
                closed.insert({x, y});
                closed.insert({y, x});
                mentioned.insert(x);
                mentioned.insert(y);
            }
            for (const auto& v : mentioned) closed.insert({v, v});
            spec.pairs = std::move(closed);
            if (spec.transitive) {
                for (const auto& [x, y] : spec.pairs)
                    for (const auto& z : mentioned)
                        if (spec.pairs.count({y, z}) && !spec.pairs.count({x, z}))
                            throw input_error("similarity '" + spec.name +
                                              "' declared transitive but (" + x + ", " + y +
                                              ", " + z + ") violates transitivity");
            }
            break;
        }
    }
    spec.validated = true;
    return spec;
}

// True iff x and y are similar. A fresh constant is similar only to the
// identical fresh constant.
inline bool sim_eval(const SimilaritySpec& spec, const Value& x, const Value& y) {
    if (x.is_fresh() || y.is_fresh()) return x == y;
    if (x == y) return true;  // equality subsumption
    switch (spec.kind) {
        case SimKind::Equality:
            return false;
        case SimKind::EditDistance:
            return levenshtein(x.text(), y.text()) <= spec.threshold;
        case SimKind::Table:
            return spec.pairs.count({x.text(), y.text()}) > 0;
    }
    return false;
}

// Named similarity predicates available to an MD set. "eq" is built in.
class SimilarityRegistry {
public:
    SimilarityRegistry() { specs_["eq"] = equality_spec(); }

    void add(SimilaritySpec spec) {
        if (spec.name == "eq")
            throw input_error("similarity name 'eq' is reserved for built-in equality");
        SimilaritySpec v = validate_similarity(std::move(spec));
        specs_[v.name] = std::move(v);
    }

    bool has(const std::string& name) const { return specs_.count(name) > 0; }

    const SimilaritySpec& get(const std::string& name) const {
        auto it = specs_.find(name);
        if (it == specs_.end())
            throw structural_error("unknown similarity predicate '" + name + "'");
        return it->second;
    }

    bool all_transitive(const std::set<std::string>& names) const {
        return std::all_of(names.begin(), names.end(),
                           [&](const std::string& n) { return get(n).transitive; });
    }

    const std::map<std::string, SimilaritySpec>& specs() const { return specs_; }

private:
    std::map<std::string, SimilaritySpec> specs_;
};

}  // namespace mdchase
