#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mdchase/error.hpp"
#include "mdchase/md.hpp"
#include "mdchase/schema.hpp"

namespace mdchase {

namespace detail {

// Small union-find over an ordered key type.
template <typename K>
class UnionFind {
public:
    bool contains(const K& k) const { return parent_.count(k) > 0; }

    void add_if_missing(const K& k) {
        if (!parent_.count(k)) parent_.emplace(k, k);
    }

    K find(const K& k) {
        K p = parent_.at(k);
        if (p == k) return k;
        K root = find(p);
        parent_[k] = root;
        return root;
    }

    void merge(const K& a, const K& b) {
        add_if_missing(a);
        add_if_missing(b);
        K ra = find(a), rb = find(b);
        if (ra == rb) return;
        if (rb < ra) std::swap(ra, rb);
        parent_[rb] = ra;
    }

    std::vector<std::set<K>> classes() {
        std::map<K, std::set<K>> by_root;
        for (const auto& [k, p] : parent_) by_root[find(k)].insert(k);
        std::vector<std::set<K>> out;
        for (auto& [root, cls] : by_root) out.push_back(std::move(cls));
        return out;
    }

private:
    std::map<K, K> parent_;
};

}  // namespace detail

// Directed graph on MDs: an edge m1 -> m2 whenever RHS(m1) overlaps LHS(m2)
// as qualified attribute sets. Self-loops are possible and count as cycles.
struct MDGraph {
    std::vector<std::string> ids;
    std::vector<std::vector<bool>> edge;  // edge[i][j]: ids[i] -> ids[j]

    bool has_edge(std::size_t i, std::size_t j) const { return edge[i][j]; }

    bool acyclic() const {
        const std::size_t n = ids.size();
        std::vector<int> state(n, 0);  // 0 unvisited, 1 on stack, 2 done
        std::vector<std::size_t> stack;
        for (std::size_t s = 0; s < n; ++s) {
            if (state[s]) continue;
            stack.push_back(s);
            while (!stack.empty()) {
                std::size_t v = stack.back();
                if (state[v] == 0) {
                    state[v] = 1;
                    for (std::size_t w = 0; w < n; ++w)
                        if (edge[v][w]) {
                            if (state[w] == 1) return false;
                            if (state[w] == 0) stack.push_back(w);
                        }
                } else {
                    if (state[v] == 1) state[v] = 2;
                    stack.pop_back();
                }
            }
        }
        return true;
    }

    bool has_any_edge() const {
        for (const auto& row : edge)
            for (bool b : row)
                if (b) return true;
        return false;
    }

    bool has_self_loop() const {
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (edge[i][i]) return true;
        return false;
    }
};

// Analysis covers sets over at most two relations, both mentioned by every
// MD when there are two.
inline void check_analysis_shape(const MDSet& m) {
    std::set<std::string> rels = m.relations();
    if (rels.size() > 2)
        throw structural_error("unsupported shape: analysis covers MD sets over at most two relations; this set uses " +
                               std::to_string(rels.size()));
    if (rels.size() == 2)
        for (const auto& md : m.mds)
            if (md.relations().size() != 2)
                throw structural_error("unsupported shape: a two-relation MD set requires both relations in every MD; '" +
                                       md.id + "' mentions only one");
}

inline MDGraph build_mdg(const MDSet& m) {
    check_analysis_shape(m);
    MDGraph g;
    const std::size_t n = m.mds.size();
    g.edge.assign(n, std::vector<bool>(n, false));
    for (const auto& md : m.mds) g.ids.push_back(md.id);
    for (std::size_t i = 0; i < n; ++i) {
        AttrSet rhs = m.mds[i].rhs_attrs();
        for (std::size_t j = 0; j < n; ++j) {
            AttrSet lhs = m.mds[j].lhs_attrs();
            for (const AttrRef& a : rhs)
                if (lhs.count(a)) {
                    g.edge[i][j] = true;
                    break;
                }
        }
    }
    return g;
}

struct StructureReport {
    bool acyclic = true;
    bool interacting = false;  // at least one MDG edge (rendering of the informal notion)
    bool pair_preserving = true;
    bool has_self_loop = false;
    // indices into the MD set; populated iff |M| = 2 with an edge m1 -> m2
    // and no edge m2 -> m1
    std::optional<std::pair<std::size_t, std::size_t>> linear_pair;
};

// Each attribute may be similarity- or match-paired with at most one partner
// attribute across the whole set.
inline bool is_pair_preserving(const MDSet& m) {
    std::map<AttrRef, std::set<AttrRef>> partners;
    for (const auto& md : m.mds) {
        for (const auto& p : md.lhs) {
            partners[p.left].insert(p.right);
            partners[p.right].insert(p.left);
        }
        for (const auto& p : md.rhs) {
            partners[p.left].insert(p.right);
            partners[p.right].insert(p.left);
        }
    }
    for (const auto& [attr, ps] : partners)
        if (ps.size() > 1) return false;
    return true;
}

inline StructureReport structure_report(const MDSet& m, const MDGraph& g) {
    StructureReport r;
    r.acyclic = g.acyclic();
    r.interacting = g.has_any_edge();
    r.pair_preserving = is_pair_preserving(m);
    r.has_self_loop = g.has_self_loop();
    if (m.mds.size() == 2) {
        if (g.has_edge(0, 1) && !g.has_edge(1, 0)) r.linear_pair = {0, 1};
        else if (g.has_edge(1, 0) && !g.has_edge(0, 1)) r.linear_pair = {1, 0};
    }
    return r;
}

inline StructureReport structure_report(const MDSet& m) {
    return structure_report(m, build_mdg(m));
}

enum class Side { L, R };

// Equivalence classes of the reflexive-transitive-symmetric closure of one
// side's attribute pairing relation (LRel / RRel).
struct AttributePartition {
    std::string md_id;
    Side side;
    std::vector<AttrSet> classes;
};

inline AttributePartition components(const MatchingDependency& md, Side side) {
    detail::UnionFind<AttrRef> uf;
    if (side == Side::L) {
        for (const auto& p : md.lhs) uf.merge(p.left, p.right);
    } else {
        for (const auto& p : md.rhs) uf.merge(p.left, p.right);
    }
    AttributePartition part;
    part.md_id = md.id;
    part.side = side;
    for (auto& cls : uf.classes()) part.classes.push_back(std::move(cls));
    return part;
}

// An equivalence class of TC(B_X) containing an attribute of LHS(m2); bound
// when it also meets LHS(m1).
struct EquivalentSet {
    std::string rel;
    AttrSet attrs;
    bool bound = false;
};

// Computes the R-ESs and S-ESs of an ordered MD pair, keyed by relation
// name. B_X relates two attributes of relation X lying in the same
// R-component of m1 or the same L-component of m2. Total over any ordered
// pair; the analyzer only consults it for linear pairs.
inline std::vector<EquivalentSet> equivalent_sets(const MatchingDependency& m1,
                                                  const MatchingDependency& m2) {
    std::set<std::string> rels;
    for (const auto& r : m1.relations()) rels.insert(r);
    for (const auto& r : m2.relations()) rels.insert(r);

    AttrSet lhs1 = m1.lhs_attrs(), lhs2 = m2.lhs_attrs();
    std::vector<EquivalentSet> out;
    for (const std::string& rel : rels) {
        detail::UnionFind<AttrRef> uf;
        for (const AttrSet& s : {m1.lhs_attrs(), m1.rhs_attrs(), lhs2, m2.rhs_attrs()})
            for (const AttrRef& a : s)
                if (a.rel == rel) uf.add_if_missing(a);
        auto merge_within = [&](const AttrSet& cls) {
            const AttrRef* first = nullptr;
            for (const AttrRef& a : cls) {
                if (a.rel != rel) continue;
                if (first) uf.merge(*first, a);
                else first = &a;
            }
        };
        for (const auto& cls : components(m1, Side::R).classes) merge_within(cls);
        for (const auto& cls : components(m2, Side::L).classes) merge_within(cls);
        for (auto& cls : uf.classes()) {
            bool meets_lhs2 = std::any_of(cls.begin(), cls.end(),
                                          [&](const AttrRef& a) { return lhs2.count(a) > 0; });
            if (!meets_lhs2) continue;
            EquivalentSet es;
            es.rel = rel;
            es.bound = std::any_of(cls.begin(), cls.end(),
                                   [&](const AttrRef& a) { return lhs1.count(a) > 0; });
            es.attrs = std::move(cls);
            out.push_back(std::move(es));
        }
    }
    return out;
}

namespace detail {

inline bool non_inclusive_impl(const AttrRef& b, const std::set<std::string>& keep, const MDSet& m,
                               std::size_t depth) {
    if (depth > m.mds.size() + 1)
        throw structural_error("non-inclusiveness recursion exceeded the acyclic bound");
    AttrSet keep_lhs;
    for (const auto& md : m.mds)
        if (keep.count(md.id))
            for (const AttrRef& a : md.lhs_attrs()) keep_lhs.insert(a);
    for (const auto& md : m.mds) {
        if (keep.count(md.id)) continue;
        if (!md.rhs_attrs().count(b)) continue;
        bool found = false;
        for (const AttrRef& c : md.lhs_attrs()) {
            if (keep_lhs.count(c)) continue;
            if (non_inclusive_impl(c, keep, m, depth + 1)) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace detail

// Recursive non-inclusiveness of attribute b wrt the MD subset keep. Walks
// MDG edges backwards; requires a pair-preserving acyclic set.
inline bool non_inclusive(const AttrRef& b, const std::set<std::string>& keep, const MDSet& m) {
    if (!is_pair_preserving(m))
        throw structural_error("non-inclusiveness requires a pair-preserving MD set");
    if (!build_mdg(m).acyclic())
        throw structural_error("non-inclusiveness requires an acyclic MD set");
    return detail::non_inclusive_impl(b, keep, m, 0);
}

enum class VerdictOutcome { Hard, Easy, Unknown };
enum class VerdictBasis { Thm1, Thm2, Thm3, None };

inline std::string to_string(VerdictOutcome o) {
    switch (o) {
        case VerdictOutcome::Hard: return "HARD";
        case VerdictOutcome::Easy: return "EASY";
        case VerdictOutcome::Unknown: return "UNKNOWN";
    }
    return "?";
}

inline std::string to_string(VerdictBasis b) {
    switch (b) {
        case VerdictBasis::Thm1: return "Theorem 1";
        case VerdictBasis::Thm2: return "Theorem 2";
        case VerdictBasis::Thm3: return "Theorem 3";
        case VerdictBasis::None: return "none";
    }
    return "?";
}

// One side of the Theorem-1 condition table, evaluated over the attributes
// of one relation. The side holds when any of (i), (ii), (iii) is true.
struct Thm1Conditions {
    char label = 'a';
    std::string rel;
    bool i = false;
    bool ii = false;
    bool iii = false;

    bool holds() const { return i || ii || iii; }
};

struct Thm3Witness {
    std::string m1;
    std::string m2;
    AttrRef b;  // in RHS(m1) ∩ LHS(m2), non-inclusive wrt {m2}
    AttrRef c;  // in RHS(m2), non-inclusive wrt {m1, m2}
};

struct Verdict {
    VerdictOutcome outcome = VerdictOutcome::Unknown;
    VerdictBasis basis = VerdictBasis::None;
    std::string witness;

    StructureReport structure;
    bool thm1_applicable = false;  // linear pair with disjoint RHSs
    bool disjoint_rhs = false;
    std::vector<Thm1Conditions> thm1;
    bool thm1_hard = false;
    bool thm3_applicable = false;  // pair-preserving and acyclic
    std::vector<Thm3Witness> thm3_witnesses;
    std::vector<std::string> trace;
};

namespace detail {

inline std::string attrs_str(const AttrSet& s) {
    std::string out = "{";
    bool first = true;
    for (const AttrRef& a : s) {
        if (!first) out += ", ";
        first = false;
        out += a.str();
    }
    return out + "}";
}

inline AttrSet intersect(const AttrSet& a, const AttrSet& b) {
    AttrSet out;
    for (const AttrRef& x : a)
        if (b.count(x)) out.insert(x);
    return out;
}

inline Thm1Conditions eval_thm1_side(char label, const std::string& rel,
                                     const MatchingDependency& m1, const MatchingDependency& m2,
                                     const std::vector<EquivalentSet>& ess,
                                     std::vector<std::string>& trace) {
    Thm1Conditions c;
    c.label = label;
    c.rel = rel;
    const std::string tag = std::string("(") + label + ")";
    trace.push_back("condition " + tag + " over attributes of " + rel + ":");

    AttrSet rel_overlap;
    for (const AttrRef& a : intersect(m1.rhs_attrs(), m2.lhs_attrs()))
        if (a.rel == rel) rel_overlap.insert(a);
    c.i = rel_overlap.empty();
    trace.push_back("  " + tag + "(i) no attributes of " + rel + " in RHS(" + m1.id + ") ∩ LHS(" +
                    m2.id + "): " + (c.i ? "true" : "false, overlap " + attrs_str(rel_overlap)));

    c.ii = true;
    std::size_t es_count = 0;
    for (const auto& es : ess) {
        if (es.rel != rel) continue;
        ++es_count;
        trace.push_back("  " + tag + "(ii) " + rel + "-ES " + attrs_str(es.attrs) + " is " +
                        (es.bound ? "bound" : "not bound"));
        if (!es.bound) c.ii = false;
    }
    trace.push_back("  " + tag + "(ii) all " + std::to_string(es_count) + " " + rel +
                    "-ESs bound: " + (c.ii ? "true" : "false"));

    c.iii = true;
    AttrSet lhs2 = m2.lhs_attrs();
    for (const auto& L : components(m1, Side::L).classes) {
        bool ok = std::any_of(L.begin(), L.end(), [&](const AttrRef& a) {
            return a.rel == rel && lhs2.count(a) > 0;
        });
        trace.push_back("  " + tag + "(iii) L-component " + attrs_str(L) +
                        (ok ? " meets LHS(" : " has no attribute of " + rel + " in LHS(") + m2.id +
                        ")");
        if (!ok) c.iii = false;
    }
    trace.push_back("  " + tag + "(iii) every L-component of " + m1.id + " has an attribute of " +
                    rel + " in LHS(" + m2.id + "): " + (c.iii ? "true" : "false"));
    trace.push_back("  " + tag + " " + (c.holds() ? "holds" : "fails"));
    return c;
}

}  // namespace detail

// The static Hard / Easy / Unknown classification. Theorem 1 covers linear
// pairs with disjoint RHSs; Theorem 3 covers pair-preserving acyclic sets;
// Theorem 2 upgrades a non-hard Theorem-1 pair to Easy when every
// similarity predicate in the set is transitive. Outside those scopes the
// verdict stays Unknown; it is never guessed.
inline Verdict hardness_verdict(const MDSet& m, bool all_sims_transitive) {
    MDGraph g = build_mdg(m);
    Verdict v;
    v.structure = structure_report(m, g);
    v.trace.push_back("structure: acyclic=" + std::string(v.structure.acyclic ? "true" : "false") +
                      " interacting=" + (v.structure.interacting ? "true" : "false") +
                      " pair-preserving=" + (v.structure.pair_preserving ? "true" : "false"));
    v.trace.push_back("note: interacting is rendered as \"MDG has at least one edge\" (informal notion)");
    if (v.structure.has_self_loop)
        v.trace.push_back("note: self-loop present; treated as a cycle");

    // Theorem 1: linear pair with disjoint RHSs
    if (v.structure.linear_pair) {
        auto [i1, i2] = *v.structure.linear_pair;
        const MatchingDependency& m1 = m.mds[i1];
        const MatchingDependency& m2 = m.mds[i2];
        v.trace.push_back("linear pair: (" + m1.id + ", " + m2.id + ")");
        AttrSet rhs_overlap = detail::intersect(m1.rhs_attrs(), m2.rhs_attrs());
        v.disjoint_rhs = rhs_overlap.empty();
        v.trace.push_back("RHS(" + m1.id + ") ∩ RHS(" + m2.id + ") = " +
                          detail::attrs_str(rhs_overlap));
        if (v.disjoint_rhs) {
            v.thm1_applicable = true;
            std::vector<EquivalentSet> ess = equivalent_sets(m1, m2);
            std::vector<std::string> rels;
            rels.push_back(m1.left_rel());
            for (const auto& r : m.relations())
                if (r != rels.front()) rels.push_back(r);
            char label = 'a';
            for (const std::string& rel : rels) {
                v.thm1.push_back(detail::eval_thm1_side(label, rel, m1, m2, ess, v.trace));
                ++label;
            }
            if (rels.size() == 1) {
                Thm1Conditions c = v.thm1.front();
                c.label = 'b';
                v.thm1.push_back(c);
                v.trace.push_back("condition (b) coincides with (a): single relation");
            }
            v.thm1_hard = std::any_of(v.thm1.begin(), v.thm1.end(),
                                      [](const Thm1Conditions& c) { return !c.holds(); });
            v.trace.push_back(std::string("Theorem 1: ") +
                              (v.thm1_hard ? "a condition fails, so the pair is hard"
                                           : "conditions (a) and (b) both hold"));
        } else {
            v.trace.push_back("Theorem 1 not applicable: RHSs overlap");
        }
    } else {
        v.trace.push_back("no linear pair");
    }

    // Theorem 3: pair-preserving acyclic sets
    if (v.structure.pair_preserving && v.structure.acyclic) {
        v.thm3_applicable = true;
        for (std::size_t i = 0; i < m.mds.size(); ++i) {
            for (std::size_t j = 0; j < m.mds.size(); ++j) {
                if (i == j) continue;
                const MatchingDependency& m1 = m.mds[i];
                const MatchingDependency& m2 = m.mds[j];
                AttrSet bs = detail::intersect(m1.rhs_attrs(), m2.lhs_attrs());
                if (bs.empty()) continue;
                for (const AttrRef& cand_c : m2.rhs_attrs()) {
                    if (!detail::non_inclusive_impl(cand_c, {m1.id, m2.id}, m, 0)) continue;
                    for (const AttrRef& cand_b : bs) {
                        if (!detail::non_inclusive_impl(cand_b, {m2.id}, m, 0)) continue;
                        v.thm3_witnesses.push_back(Thm3Witness{m1.id, m2.id, cand_b, cand_c});
                        v.trace.push_back("Theorem 3 witness: m1=" + m1.id + " m2=" + m2.id +
                                          " B=" + cand_b.str() + " C=" + cand_c.str() +
                                          " (B non-inclusive wrt {" + m2.id +
                                          "}, C non-inclusive wrt {" + m1.id + ", " + m2.id + "})");
                    }
                }
            }
        }
        if (v.thm3_witnesses.empty()) v.trace.push_back("Theorem 3: no witness found");
    } else {
        v.trace.push_back("Theorem 3 not applicable: requires a pair-preserving acyclic set");
    }

    if (v.thm1_applicable && v.thm1_hard) {
        v.outcome = VerdictOutcome::Hard;
        v.basis = VerdictBasis::Thm1;
        for (const auto& c : v.thm1)
            if (!c.holds()) {
                v.witness = std::string("condition (") + c.label + ") over " + c.rel +
                            " fails: (i)=" + (c.i ? "true" : "false") +
                            " (ii)=" + (c.ii ? "true" : "false") +
                            " (iii)=" + (c.iii ? "true" : "false");
                break;
            }
    } else if (v.thm3_applicable && !v.thm3_witnesses.empty()) {
        v.outcome = VerdictOutcome::Hard;
        v.basis = VerdictBasis::Thm3;
        const Thm3Witness& w = v.thm3_witnesses.front();
        v.witness = "B=" + w.b.str() + " C=" + w.c.str() + " via (" + w.m1 + ", " + w.m2 + ")";
    } else if (v.thm1_applicable) {
        if (all_sims_transitive) {
            v.trace.push_back("Theorem 2: all similarity predicates transitive and no hardness condition fails");
            v.outcome = VerdictOutcome::Easy;
            v.basis = VerdictBasis::Thm2;
            v.witness = "linear pair with disjoint RHSs, transitive similarities, conditions (a) and (b) hold";
        } else {
            v.trace.push_back("Theorem 2 not applicable: similarity predicates not all transitive");
        }
    }
    v.trace.push_back("verdict: " + to_string(v.outcome) +
                      (v.basis == VerdictBasis::None ? "" : " (" + to_string(v.basis) + ")"));
    return v;
}

}  // namespace mdchase
