#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mdchase/analysis.hpp"
#include "mdchase/error.hpp"
#include "mdchase/instance.hpp"
#include "mdchase/md.hpp"
#include "mdchase/similarity.hpp"
#include "mdchase/value.hpp"

namespace mdchase {

// Which reading of "modifiable position" applies. The conjunctive reading
// (default) requires an MD-induced match AND a value disagreement on the
// matched side; the disjunctive reading treats any match with the attribute
// on an RHS as licence to change.
enum class Modifiability { Conjunctive, Disjunctive };

inline std::string to_string(Modifiability m) {
    return m == Modifiability::Conjunctive ? "conjunctive" : "disjunctive";
}

inline Modifiability parse_modifiability(const std::string& s) {
    if (s == "conjunctive") return Modifiability::Conjunctive;
    if (s == "disjunctive") return Modifiability::Disjunctive;
    throw input_error("unknown modifiability mode '" + s + "' (expected conjunctive or disjunctive)");
}

// Ordered tuple-id pairs (u, v) such that every lhs conjunct of md holds
// between u (left relation role) and v (right relation role). Includes
// u = v for single-relation MDs.
inline std::vector<std::pair<TupleId, TupleId>> match_pairs(const Instance& d, const MDSet& m,
                                                            const MatchingDependency& md) {
    std::vector<std::pair<TupleId, TupleId>> out;
    const auto& left = d.tuples(md.left_rel());
    const auto& right = d.tuples(md.right_rel());
    for (const auto& [u, ut] : left) {
        for (const auto& [v, vt] : right) {
            bool all = true;
            for (const LhsPair& p : md.lhs) {
                const SimilaritySpec& spec = m.sims->get(p.sim);
                if (!sim_eval(spec, d.at(Position{u, p.left}), d.at(Position{v, p.right}))) {
                    all = false;
                    break;
                }
            }
            if (all) out.emplace_back(u, v);
        }
    }
    return out;
}

// Positions allowed to change in a single step from d.
inline std::set<Position> modifiable_positions(const Instance& d, const MDSet& m,
                                               Modifiability mode = Modifiability::Conjunctive) {
    std::set<Position> out;
    for (const auto& md : m.mds) {
        for (const auto& [u, v] : match_pairs(d, m, md)) {
            for (const RhsPair& p : md.rhs) {
                Position pu{u, p.left}, pv{v, p.right};
                if (mode == Modifiability::Disjunctive || !(d.at(pu) == d.at(pv))) {
                    out.insert(pu);
                    out.insert(pv);
                }
            }
        }
    }
    return out;
}

// One equivalence class of positions the next step must equalize.
struct ForcedClass {
    std::set<Position> members;
    std::set<Value> values;           // distinct values currently held
    std::vector<Value> candidates;    // values (sorted) plus one fresh constant
    bool settled = false;             // all members already share one value
    std::set<Position> modifiable;    // members that may change

    std::string members_str() const {
        std::string s = "{";
        bool first = true;
        for (const Position& p : members) {
            if (!first) s += ", ";
            first = false;
            s += p.str();
        }
        return s + "}";
    }
};

struct PositionPartition {
    std::vector<ForcedClass> classes;
};

namespace detail {

inline std::uint64_t next_fresh_id(const Instance& d) {
    std::uint64_t next = 0;
    for (const auto& [rel, ts] : d.relations())
        for (const auto& [tid, tuple] : ts)
            for (const Value& v : tuple)
                if (v.is_fresh() && v.fresh_id() + 1 > next) next = v.fresh_id() + 1;
    return next;
}

}  // namespace detail

// Union-find closure of the rhs position pairings of every matched tuple
// pair. Candidates per class are the values its members hold plus one fresh
// constant, minted distinctly per class above any fresh value already in d.
inline PositionPartition forced_classes(const Instance& d, const MDSet& m,
                                        Modifiability mode = Modifiability::Conjunctive) {
    detail::UnionFind<Position> uf;
    for (const auto& md : m.mds) {
        for (const auto& [u, v] : match_pairs(d, m, md)) {
            for (const RhsPair& p : md.rhs) {
                Position pu{u, p.left}, pv{v, p.right};
                if (!(pu == pv)) uf.merge(pu, pv);
            }
        }
    }
    std::set<Position> modifiable = modifiable_positions(d, m, mode);
    PositionPartition part;
    std::uint64_t fresh_base = detail::next_fresh_id(d);
    for (auto& cls : uf.classes()) {
        ForcedClass fc;
        fc.members = std::move(cls);
        for (const Position& p : fc.members) {
            fc.values.insert(d.at(p));
            if (modifiable.count(p)) fc.modifiable.insert(p);
        }
        fc.settled = fc.values.size() == 1;
        fc.candidates.assign(fc.values.begin(), fc.values.end());
        fc.candidates.push_back(Value::fresh(fresh_base + part.classes.size()));
        part.classes.push_back(std::move(fc));
    }
    return part;
}

// True iff d satisfies every MD as an equality-generating dependency: all
// rhs-paired values of every matched tuple pair are already equal.
inline bool is_resolved(const Instance& d, const MDSet& m) {
    for (const auto& md : m.mds)
        for (const auto& [u, v] : match_pairs(d, m, md))
            for (const RhsPair& p : md.rhs)
                if (!(d.at(Position{u, p.left}) == d.at(Position{v, p.right}))) return false;
    return true;
}

// One node of the chase search tree.
struct ChaseNode {
    Instance instance;
    std::size_t depth = 0;
    std::set<Position> changed;  // cumulative over the path from the root
};

struct Successor {
    ChaseNode node;
    std::string assignment;  // human-readable class-value choices
};

struct Expansion {
    std::vector<Successor> successors;
    std::vector<std::string> dead_ends;
};

// All one-step successors of an unresolved node: every assignment of one
// candidate value to every unsettled class, except that a class containing a
// non-modifiable member is pinned to that member's value, and a class whose
// non-modifiable members disagree admits no assignment at all (a dead end,
// reported rather than silently dropped).
inline Expansion expand(const ChaseNode& node, const MDSet& m,
                        Modifiability mode = Modifiability::Conjunctive) {
    const Instance& d = node.instance;
    Expansion out;
    PositionPartition part = forced_classes(d, m, mode);
    std::vector<const ForcedClass*> open;
    for (const auto& c : part.classes)
        if (!c.settled) open.push_back(&c);

    std::vector<std::vector<Value>> allowed(open.size());
    for (std::size_t k = 0; k < open.size(); ++k) {
        const ForcedClass& c = *open[k];
        std::set<Value> pinned;
        for (const Position& p : c.members)
            if (!c.modifiable.count(p)) pinned.insert(d.at(p));
        if (pinned.size() > 1) {
            std::string vals;
            for (const Value& v : pinned) vals += (vals.empty() ? "" : ", ") + v.display();
            out.dead_ends.push_back("class " + c.members_str() +
                                    " pins disagreeing non-modifiable values {" + vals + "}");
            return out;
        }
        if (pinned.size() == 1) allowed[k] = {*pinned.begin()};
        else allowed[k] = c.candidates;
    }
    if (open.empty()) return out;

    std::vector<std::size_t> pick(open.size(), 0);
    for (;;) {
        Successor s;
        s.node.instance = d;
        s.node.depth = node.depth + 1;
        for (std::size_t k = 0; k < open.size(); ++k) {
            const Value& v = allowed[k][pick[k]];
            for (const Position& p : open[k]->members) s.node.instance.set(p, v);
            if (k) s.assignment += "; ";
            s.assignment += open[k]->members_str() + " <- " + v.display();
        }
        s.node.changed = node.changed;
        for (const Position& p : diff(d, s.node.instance)) s.node.changed.insert(p);
        out.successors.push_back(std::move(s));

        std::size_t k = 0;
        while (k < pick.size() && ++pick[k] == allowed[k].size()) pick[k++] = 0;
        if (k == pick.size()) break;
    }
    return out;
}

inline std::vector<ChaseNode> successors(const ChaseNode& node, const MDSet& m,
                                         Modifiability mode = Modifiability::Conjunctive) {
    std::vector<ChaseNode> out;
    for (auto& s : expand(node, m, mode).successors) out.push_back(std::move(s.node));
    return out;
}

// Independent check of one chase step (d1, d2) |=_um M: (a) every tuple pair
// matched in d1 has equal rhs-paired values in d2; (b) only positions
// modifiable wrt d1 differ.
inline bool validate_step(const Instance& d1, const Instance& d2, const MDSet& m,
                          Modifiability mode = Modifiability::Conjunctive) {
    if (!d1.same_tids(d2))
        throw structural_error("validate_step: instances have different relations or tuple ids");
    for (const auto& md : m.mds)
        for (const auto& [u, v] : match_pairs(d1, m, md))
            for (const RhsPair& p : md.rhs)
                if (!(d2.at(Position{u, p.left}) == d2.at(Position{v, p.right}))) return false;
    std::set<Position> changed = diff(d1, d2);
    if (changed.empty()) return true;
    std::set<Position> mod = modifiable_positions(d1, m, mode);
    for (const Position& p : changed)
        if (!mod.count(p)) return false;
    return true;
}

// Renumbers fresh constants in first-use order: relations alphabetically,
// tuple ids ascending, attributes in schema order. Two instances equal up to
// a bijective renaming of fresh constants canonicalize identically.
inline Instance canonicalize(const Instance& d) {
    std::map<std::uint64_t, std::uint64_t> renum;
    Instance out(d.schema_ptr());
    for (const auto& [rel, ts] : d.relations()) {
        for (const auto& [tid, tuple] : ts) {
            std::vector<Value> nv;
            nv.reserve(tuple.size());
            for (const Value& v : tuple) {
                if (v.is_fresh()) {
                    auto it = renum.emplace(v.fresh_id(), renum.size()).first;
                    nv.push_back(Value::fresh(it->second));
                } else {
                    nv.push_back(v);
                }
            }
            out.insert(rel, tid, std::move(nv));
        }
    }
    return out;
}

// Unambiguous text form; equal strings iff equal instances.
inline std::string serialize(const Instance& d) {
    std::string s;
    for (const auto& [rel, ts] : d.relations()) {
        s += rel;
        s += '(';
        for (const auto& [tid, tuple] : ts) {
            s += std::to_string(tid);
            s += ':';
            for (const Value& v : tuple) {
                if (v.is_fresh())
                    s += "F" + std::to_string(v.fresh_id());
                else
                    s += "G" + std::to_string(v.text().size()) + ":" + v.text();
                s += ',';
            }
            s += ';';
        }
        s += ')';
    }
    return s;
}

inline std::string canonical_key(const Instance& d) { return serialize(canonicalize(d)); }

struct ChaseOptions {
    std::size_t depth_bound = 0;  // 0 = number of MDs + 2
    std::size_t node_cap = 100000;
    Modifiability modifiability = Modifiability::Conjunctive;
    bool trace = false;
};

inline std::size_t default_depth_bound(const MDSet& m) { return m.mds.size() + 2; }

struct TraceNode {
    std::size_t id = 0;
    std::size_t parent = 0;  // == id for the root
    std::size_t depth = 0;
    std::string assignment;  // edge label from parent; empty for the root
    bool edge_valid = true;
    Instance instance;
    bool resolved = false;
    bool duplicate = false;  // canonical form already visited; not expanded
    bool at_bound = false;   // unresolved leaf cut off by the depth bound
    std::vector<std::string> dead_ends;
};

struct ChaseTree {
    std::vector<TraceNode> nodes;
};

struct ResolvedInstance {
    Instance instance;  // canonical form
    std::size_t changes = 0;
    std::size_t depth = 0;
};

struct ResolvedSet {
    std::vector<ResolvedInstance> instances;
    bool exhausted = true;        // search completed within bound and cap
    bool truncated = false;       // some branch hit the depth bound unresolved
    bool budget_exceeded = false; // node cap reached
    std::size_t nodes_expanded = 0;
    std::size_t dead_end_count = 0;
    ChaseTree tree;  // populated when ChaseOptions.trace
};

// Exhaustive breadth-first search of the chase tree up to the depth bound,
// deduplicating nodes by canonical form. Collects every resolved instance
// reached, canonicalized, with its change count against the original.
inline ResolvedSet enumerate_resolved(const Instance& d, const MDSet& m,
                                      ChaseOptions opts = {}) {
    if (opts.depth_bound == 0) opts.depth_bound = default_depth_bound(m);
    if (opts.node_cap == 0) opts.node_cap = 1;
    ResolvedSet out;

    struct QItem {
        ChaseNode node;
        std::size_t trace_id = 0;
    };
    std::deque<QItem> queue;
    std::set<std::string> visited;
    std::map<std::string, ResolvedInstance> found;

    auto record = [&](const ChaseNode& n, std::size_t parent, const std::string& label,
                      bool dup) -> std::size_t {
        if (!opts.trace) return 0;
        TraceNode t;
        t.id = out.tree.nodes.size();
        t.parent = parent;
        t.depth = n.depth;
        t.assignment = label;
        t.instance = n.instance;
        t.duplicate = dup;
        t.resolved = is_resolved(n.instance, m);
        if (t.id != parent)
            t.edge_valid = validate_step(out.tree.nodes[parent].instance, n.instance, m,
                                         opts.modifiability);
        out.tree.nodes.push_back(t);
        return t.id;
    };

    ChaseNode root{d, 0, {}};
    visited.insert(canonical_key(d));
    std::size_t root_id = record(root, 0, "", false);
    queue.push_back({std::move(root), root_id});

    while (!queue.empty()) {
        QItem item = std::move(queue.front());
        queue.pop_front();
        const ChaseNode& node = item.node;

        if (is_resolved(node.instance, m)) {
            std::string key = canonical_key(node.instance);
            if (!found.count(key))
                found.emplace(key, ResolvedInstance{canonicalize(node.instance),
                                                    change_count(d, node.instance), node.depth});
            continue;
        }
        if (node.depth >= opts.depth_bound) {
            out.truncated = true;
            if (opts.trace) out.tree.nodes[item.trace_id].at_bound = true;
            continue;
        }
        if (out.nodes_expanded >= opts.node_cap) {
            out.budget_exceeded = true;
            break;
        }
        ++out.nodes_expanded;

        Expansion exp = expand(node, m, opts.modifiability);
        out.dead_end_count += exp.dead_ends.size();
        if (opts.trace)
            for (const auto& de : exp.dead_ends)
                out.tree.nodes[item.trace_id].dead_ends.push_back(de);
        for (auto& s : exp.successors) {
            std::string key = canonical_key(s.node.instance);
            bool dup = visited.count(key) > 0;
            std::size_t tid = record(s.node, item.trace_id, s.assignment, dup);
            if (dup) continue;
            visited.insert(std::move(key));
            queue.push_back({std::move(s.node), tid});
        }
    }

    out.exhausted = !out.truncated && !out.budget_exceeded;
    for (auto& [key, ri] : found) out.instances.push_back(std::move(ri));
    std::sort(out.instances.begin(), out.instances.end(),
              [](const ResolvedInstance& a, const ResolvedInstance& b) {
                  if (a.changes != b.changes) return a.changes < b.changes;
                  return serialize(a.instance) < serialize(b.instance);
              });
    return out;
}

struct MriResult {
    std::vector<ResolvedInstance> mris;
    std::size_t min_changes = 0;  // meaningful only when mris is non-empty
    bool verified_minimal = true; // false when the search was cut short
    ResolvedSet all;
};

// The resolved instances of minimal change count. When the search was
// truncated or capped, minimality holds only for the explored space and the
// result is flagged accordingly.
inline MriResult minimally_resolved(const Instance& d, const MDSet& m, ChaseOptions opts = {}) {
    MriResult r;
    r.all = enumerate_resolved(d, m, opts);
    r.verified_minimal = r.all.exhausted;
    if (r.all.instances.empty()) return r;
    r.min_changes = r.all.instances.front().changes;  // sorted by change count
    for (const auto& ri : r.all.instances)
        if (ri.changes == r.min_changes) r.mris.push_back(ri);
    return r;
}

}  // namespace mdchase
