#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mdchase/chase.hpp"
#include "mdchase/error.hpp"
#include "mdchase/instance.hpp"
#include "mdchase/md.hpp"
#include "mdchase/query.hpp"

namespace mdchase {

// Answers to a query: over a single instance, or certain over all MRIs.
struct AnswerSet {
    std::vector<std::string> head;
    std::set<std::vector<Value>> tuples;
    std::string provenance;
    bool truncated = false;      // inherited from the chase
    bool indeterminate = false;  // zero MRIs found within bounds
    std::size_t mri_count = 0;
    std::size_t min_changes = 0;
};

namespace detail {

inline void eval_cq_rec(const ConjunctiveQuery& q, const Instance& d, std::size_t atom_idx,
                        std::map<std::string, Value>& binding,
                        std::set<std::vector<Value>>& out) {
    if (atom_idx == q.body.size()) {
        std::vector<Value> row;
        row.reserve(q.head.size());
        for (const auto& h : q.head) row.push_back(binding.at(h));
        out.insert(std::move(row));
        return;
    }
    const QueryAtom& atom = q.body[atom_idx];
    for (const auto& [tid, tuple] : d.tuples(atom.rel)) {
        std::vector<std::string> bound_here;
        bool ok = true;
        for (std::size_t i = 0; i < atom.args.size() && ok; ++i) {
            const QueryArg& a = atom.args[i];
            const Value& v = tuple[i];
            if (!a.is_var) {
                // constants match by strict equality, never by similarity
                ok = v.is_ground() && v.text() == a.value;
                continue;
            }
            auto it = binding.find(a.name);
            if (it == binding.end()) {
                binding.emplace(a.name, v);
                bound_here.push_back(a.name);
            } else {
                ok = it->second == v;
            }
        }
        if (ok) eval_cq_rec(q, d, atom_idx + 1, binding, out);
        for (const auto& n : bound_here) binding.erase(n);
    }
}

inline Instance offset_fresh(const Instance& d, std::uint64_t offset) {
    Instance out(d.schema_ptr());
    for (const auto& [rel, ts] : d.relations())
        for (const auto& [tid, tuple] : ts) {
            std::vector<Value> nv;
            nv.reserve(tuple.size());
            for (const Value& v : tuple)
                nv.push_back(v.is_fresh() ? Value::fresh(v.fresh_id() + offset) : v);
            out.insert(rel, tid, std::move(nv));
        }
    return out;
}

}  // namespace detail

// Standard conjunctive-query evaluation by exhaustive join; tuple ids are
// invisible to queries.
inline AnswerSet eval_cq(const ConjunctiveQuery& q, const Instance& d) {
    for (const auto& atom : q.body) {
        const RelationDef& def = d.schema().require(atom.rel);
        if (atom.args.size() != def.attrs.size())
            throw structural_error("query atom over '" + atom.rel + "' has arity " +
                                   std::to_string(atom.args.size()) + " but the relation has " +
                                   std::to_string(def.attrs.size()));
    }
    AnswerSet out;
    out.head = q.head;
    out.provenance = "single instance";
    std::map<std::string, Value> binding;
    detail::eval_cq_rec(q, d, 0, binding, out.tuples);
    return out;
}

// Certain answers over every minimally resolved instance. Fresh constants of
// distinct MRIs are kept disjoint, so a tuple mentioning one can only be
// certain when a single MRI exists.
inline AnswerSet resolved_answers(const ConjunctiveQuery& q, const Instance& d, const MDSet& m,
                                  ChaseOptions opts = {}) {
    MriResult r = minimally_resolved(d, m, opts);
    AnswerSet out;
    out.head = q.head;
    out.truncated = !r.verified_minimal;
    out.mri_count = r.mris.size();
    out.min_changes = r.min_changes;
    if (r.mris.empty()) {
        out.indeterminate = true;
        out.provenance = "no resolved instance found within bounds; certainty indeterminate";
        return out;
    }
    for (std::size_t i = 0; i < r.mris.size(); ++i) {
        Instance shifted =
            detail::offset_fresh(r.mris[i].instance, (static_cast<std::uint64_t>(i) + 1) << 32);
        AnswerSet one = eval_cq(q, shifted);
        if (i == 0) {
            out.tuples = std::move(one.tuples);
        } else {
            std::set<std::vector<Value>> keep;
            for (const auto& t : out.tuples)
                if (one.tuples.count(t)) keep.insert(t);
            out.tuples = std::move(keep);
        }
    }
    if (out.mri_count >= 2)
        for (const auto& t : out.tuples)
            for (const Value& v : t)
                if (v.is_fresh())
                    throw structural_error(
                        "certain answer carries a fresh constant across distinct MRIs");
    out.provenance = "certain over " + std::to_string(out.mri_count) +
                     " MRI(s) at minimal change count " + std::to_string(out.min_changes) +
                     (out.truncated ? " (search truncated; relative to explored space)" : "");
    return out;
}

// Membership test for one candidate answer. Empty optional when no resolved
// instance was found within bounds, so certainty cannot be asserted either
// way.
inline std::optional<bool> is_resolved_answer(const std::vector<Value>& tuple,
                                              const ConjunctiveQuery& q, const Instance& d,
                                              const MDSet& m, ChaseOptions opts = {}) {
    if (tuple.size() != q.head.size())
        throw input_error("answer tuple arity " + std::to_string(tuple.size()) +
                          " does not match query head arity " + std::to_string(q.head.size()));
    AnswerSet ans = resolved_answers(q, d, m, opts);
    if (ans.indeterminate) return std::nullopt;
    return ans.tuples.count(tuple) > 0;
}

}  // namespace mdchase
