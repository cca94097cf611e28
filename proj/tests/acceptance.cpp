// Acceptance gate: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mdchase/mdchase.hpp"

#include "generators.hpp"
#include "naive_chase.hpp"

using namespace mdchase;

namespace {

Value G(const std::string& s) { return Value::ground(s); }

std::shared_ptr<const SimilarityRegistry> default_registry() {
    return std::make_shared<SimilarityRegistry>();
}

MDSet md_r3_pair() {
    auto schema = std::make_shared<Schema>(std::vector<RelationDef>{{"R", {"A", "B", "C"}}});
    return parse_mds(
        "m1: R[A] = R[A] -> R[B] == R[B]\n"
        "m2: R[B] = R[B] -> R[C] == R[C]\n",
        schema, default_registry());
}

Instance three_tuple(const MDSet& m) {
    Instance d(m.schema);
    d.insert("R", 1, {G("a"), G("b"), G("d")});
    d.insert("R", 2, {G("a"), G("c"), G("e")});
    d.insert("R", 3, {G("a"), G("b"), G("e")});
    return d;
}

Instance uniform3(const MDSet& m, const std::string& b, const std::string& c) {
    Instance d(m.schema);
    for (TupleId t = 1; t <= 3; ++t) d.insert("R", t, {G("a"), G(b), G(c)});
    return d;
}

struct Gate {
    bool all_ok = true;

    void report(int n, const std::string& what, bool ok, const std::string& detail = "") {
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what;
        if (!ok && !detail.empty()) std::cout << " (" << detail << ")";
        std::cout << "\n";
        if (!ok) all_ok = false;
    }
};

bool criterion1(std::string& detail) {
    auto start = std::chrono::steady_clock::now();
    MDSet m = md_r3_pair();
    Instance d = three_tuple(m);
    ChaseOptions opts;
    opts.depth_bound = 3;
    MriResult mri = minimally_resolved(d, m, opts);

    Instance d1 = uniform3(m, "b", "d");
    Instance d2 = uniform3(m, "b", "e");
    bool saw1 = false, saw2 = false;
    std::size_t changes1 = 0;
    for (const auto& ri : mri.all.instances) {
        if (ri.instance == d1) saw1 = true, changes1 = ri.changes;
        if (ri.instance == d2) saw2 = true;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!saw1 || !saw2) return detail = "missing D_1 or D_2 among resolved instances", false;
    if (changes1 != 3) return detail = "D_1 change count != 3", false;
    if (mri.mris.size() != 1 || !(mri.mris[0].instance == d2))
        return detail = "MRI set is not exactly {D_2}", false;
    if (mri.min_changes != 2) return detail = "minimal change count != 2", false;
    if (!mri.verified_minimal || !mri.all.exhausted)
        return detail = "search did not complete", false;
    if (secs >= 1.0) return detail = "took " + std::to_string(secs) + " s", false;
    return true;
}

bool criterion2(std::string& detail) {
    MDSet m = md_r3_pair();
    Instance d = three_tuple(m);
    if (!validate_step(d, uniform3(m, "b", "e"), m))
        return detail = "validate_step(D, D_2) != true", false;
    if (validate_step(d, uniform3(m, "b", "d"), m))
        return detail = "validate_step(D, D_1) != false", false;
    return true;
}

bool criterion3(std::string& detail) {
    auto schema = std::make_shared<Schema>(std::vector<RelationDef>{{"R", {"A", "B"}}});
    MDSet m = parse_mds("m1: R[A] = R[A] -> R[B] == R[B]\n", schema, default_registry());
    Instance dprime(schema);
    dprime.insert("R", 1, {G("a"), G("b")});
    dprime.insert("R", 2, {G("a"), G("b")});
    if (!is_resolved(dprime, m)) return detail = "D' not resolved", false;
    if (!modifiable_positions(dprime, m).empty())
        return detail = "modifiable_positions(D') not empty", false;

    Instance d(schema);
    d.insert("R", 1, {G("a"), G("b")});
    d.insert("R", 2, {G("a"), G("c")});
    MriResult mri = minimally_resolved(d, m);
    Instance all_b(schema), all_c(schema);
    for (TupleId t : {1, 2}) {
        all_b.insert("R", t, {G("a"), G("b")});
        all_c.insert("R", t, {G("a"), G("c")});
    }
    std::set<std::string> got;
    for (const auto& ri : mri.mris) got.insert(canonical_key(ri.instance));
    std::set<std::string> want{canonical_key(all_b), canonical_key(all_c)};
    if (got != want || mri.min_changes != 1)
        return detail = "MRIs are not exactly the two 1-change resolutions", false;
    bool fresh_costs2 = false;
    for (const auto& ri : mri.all.instances)
        if (ri.changes == 2 && !ri.instance.at(Position{1, {"R", "B"}}).is_ground())
            fresh_costs2 = true;
    if (!fresh_costs2) return detail = "fresh-valued resolution at cost 2 missing", false;

    naive::Enumeration oracle =
        naive::enumerate(d, m, default_depth_bound(m), Modifiability::Conjunctive);
    std::map<std::string, std::size_t> engine_mris;
    for (const auto& ri : mri.mris)
        engine_mris.emplace(naive::canonical_string(ri.instance), ri.changes);
    if (engine_mris != naive::mris(oracle))
        return detail = "MRI set disagrees with the naive enumerator", false;
    return true;
}

bool criterion4(std::string& detail) {
    MDSet m = md_r3_pair();
    StructureReport s = structure_report(m);
    if (!s.acyclic || !s.interacting || !s.pair_preserving || !s.linear_pair.has_value())
        return detail = "structure flags wrong", false;
    Verdict v = hardness_verdict(m, true);
    if (v.outcome != VerdictOutcome::Hard || v.basis != VerdictBasis::Thm1)
        return detail = "verdict is not Hard via Theorem 1", false;
    if (v.thm1.size() != 2) return detail = "expected two condition blocks", false;
    for (const auto& c : v.thm1)
        if (c.i || c.ii || c.iii) return detail = "(a)(i)-(iii) not all false", false;
    if (!v.thm3_applicable || v.thm3_witnesses.empty())
        return detail = "Theorem 3 path did not flag hardness", false;

    std::ifstream golden(std::string(MDCHASE_SOURCE_DIR) + "/tests/data/eq3_trace.txt",
                         std::ios::binary);
    if (!golden.good()) return detail = "golden trace file missing", false;
    std::ostringstream want;
    want << golden.rdbuf();
    std::string got;
    for (const auto& line : v.trace) got += line + "\n";
    if (got != want.str()) return detail = "trace differs from golden file", false;
    return true;
}

bool criterion5(std::string& detail) {
    auto schema = std::make_shared<Schema>(
        std::vector<RelationDef>{{"R", {"A", "B", "C"}}, {"S", {"X", "Y", "Z"}}});
    MDSet wide =
        parse_mds("m1: R[A] = R[A] -> R[B, C] == R[B, C]\n", schema, default_registry());
    MDSet narrow =
        parse_mds("m1: R[A] = R[A] -> R[B] == R[B]\n", schema, default_registry());

    int ok = 0;
    ok += classify_query(parse_query("Q() :- R(x, y, \"c\"), R(z, y, \"d\")", *schema),
                         wide) == QueryClass::NonUJCQ;
    ok += classify_query(parse_query("Q(y, y', z') :- R(x, y, z), R(x, y', z')", *schema),
                         wide) == QueryClass::UJCQOnly;
    ok += classify_query(parse_query("Q(x, z) :- R(x, y, z)", *schema), narrow) ==
          QueryClass::UJCQOnly;
    ok += classify_query(parse_query("Q(x, y, z) :- R(x, y, z), S(x, w, t)", *schema),
                         narrow) == QueryClass::CHAQ;
    if (ok != 4) return detail = std::to_string(ok) + "/4 classifications matched", false;
    return true;
}

bool criterion6(std::string& detail) {
    MDSet m = md_r3_pair();
    Instance d = three_tuple(m);
    ConjunctiveQuery q = parse_query("Q(x, y, z) :- R(x, y, z)", *m.schema);
    AnswerSet ans = resolved_answers(q, d, m);
    std::set<std::vector<Value>> want{{G("a"), G("b"), G("e")}};
    if (ans.tuples != want) return detail = "answer set != {(a,b,e)}", false;
    if (is_resolved_answer({G("a"), G("b"), G("e")}, q, d, m) != true)
        return detail = "(a,b,e) not accepted", false;
    if (is_resolved_answer({G("a"), G("b"), G("d")}, q, d, m) != false)
        return detail = "(a,b,d) not rejected", false;
    return true;
}

bool criterion7(std::string& detail) {
    auto start = std::chrono::steady_clock::now();
    gen::Rng rng;
    int discrepancies = 0;
    for (int iter = 0; iter < 500; ++iter) {
        auto schema = gen::single_rel_schema(rng.range(2, 3));
        Instance d = gen::random_instance(rng, schema, 5, 3);
        MDSet m = gen::random_mds(rng, schema);
        std::size_t bound = default_depth_bound(m);

        ChaseOptions opts;
        opts.depth_bound = bound;
        ResolvedSet engine = enumerate_resolved(d, m, opts);
        naive::Enumeration oracle =
            naive::enumerate(d, m, bound, Modifiability::Conjunctive);

        std::map<std::string, std::size_t> engine_set;
        for (const auto& ri : engine.instances)
            engine_set.emplace(naive::canonical_string(ri.instance), ri.changes);
        if (engine_set != oracle.resolved || engine.truncated != oracle.truncated) {
            ++discrepancies;
            continue;
        }
        MriResult mri = minimally_resolved(d, m, opts);
        std::map<std::string, std::size_t> engine_mris;
        for (const auto& ri : mri.mris)
            engine_mris.emplace(naive::canonical_string(ri.instance), ri.changes);
        if (engine_mris != naive::mris(oracle)) ++discrepancies;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (discrepancies > 0)
        return detail = std::to_string(discrepancies) + " discrepancies", false;
    if (secs >= 60.0) return detail = "took " + std::to_string(secs) + " s", false;
    return true;
}

bool criterion8(std::string& detail) {
    gen::Rng rng;
    int violations = 0;
    for (int iter = 0; iter < 150; ++iter) {
        auto schema = gen::single_rel_schema(rng.range(2, 3));
        Instance d = gen::random_instance(rng, schema, 4, 3);
        MDSet m = gen::random_mds(rng, schema);
        Modifiability mode =
            rng.coin() ? Modifiability::Conjunctive : Modifiability::Disjunctive;
        ChaseOptions opts;
        opts.trace = true;
        opts.modifiability = mode;
        ResolvedSet rs = enumerate_resolved(d, m, opts);
        if (rs.tree.nodes.empty()) return detail = "trace missing", false;
        for (const TraceNode& n : rs.tree.nodes) {
            if (n.id != n.parent &&
                !validate_step(rs.tree.nodes[n.parent].instance, n.instance, m, mode))
                ++violations;
            if (!n.edge_valid) ++violations;
        }
        for (const auto& ri : rs.instances)
            if (!is_resolved(ri.instance, m)) ++violations;
    }

    int agreed = 0;
    for (int iter = 0; iter < 220; ++iter) {
        MDSet m = gen::random_linear_pair(rng, rng.range(3, 5));
        Verdict v = hardness_verdict(m, true);
        if (!v.thm1_applicable || !v.thm3_applicable)
            return detail = "generated pair outside theorem scope", false;
        if (v.thm1_hard != !v.thm3_witnesses.empty())
            ++violations;
        else
            ++agreed;
    }
    if (agreed < 200) return detail = "fewer than 200 agreement checks", false;
    if (violations > 0) return detail = std::to_string(violations) + " violations", false;
    return true;
}

bool criterion9(std::string& detail) {
    gen::Rng rng;
    auto reg = std::make_shared<SimilarityRegistry>();
    SimilaritySpec near;
    near.name = "near";
    near.kind = SimKind::EditDistance;
    near.threshold = 2;
    reg->add(near);
    SimilaritySpec table;
    table.name = "tab";
    table.kind = SimKind::Table;
    for (int i = 0; i < 30; ++i)
        table.pairs.insert({std::string(1, char('a' + rng.below(6))) +
                                std::string(1, char('a' + rng.below(6))),
                            std::string(1, char('a' + rng.below(6))) +
                                std::string(1, char('a' + rng.below(6)))});
    reg->add(table);

    auto random_value = [&](bool allow_fresh) {
        if (allow_fresh && rng.below(8) == 0) return Value::fresh(rng.below(3));
        std::string s;
        std::size_t len = rng.below(4);
        for (std::size_t i = 0; i < len; ++i) s += char('a' + rng.below(6));
        return Value::ground(s);
    };

    int violations = 0;
    for (const std::string& name : {std::string("eq"), std::string("near"), std::string("tab")}) {
        const SimilaritySpec& spec = reg->get(name);
        for (int i = 0; i < 1000; ++i) {
            Value x = random_value(true), y = random_value(true);
            if (sim_eval(spec, x, y) != sim_eval(spec, y, x)) ++violations;  // symmetry
            if (x == y && !sim_eval(spec, x, y)) ++violations;  // equality subsumption
            if (!sim_eval(spec, x, x)) ++violations;
        }
    }
    if (violations > 0) return detail = std::to_string(violations) + " violations", false;
    return true;
}

}  // namespace

int main() {
    Gate gate;
    std::string detail;

    detail.clear();
    gate.report(1, "three-tuple chase finds D_1, D_2 and the unique 2-change MRI in < 1 s",
                criterion1(detail), detail);
    detail.clear();
    gate.report(2, "single-step semantics accepts D_2 and rejects D_1", criterion2(detail),
                detail);
    detail.clear();
    gate.report(3, "two-tuple instance: resolvedness, empty modifiable set, exact MRI pair",
                criterion3(detail), detail);
    detail.clear();
    gate.report(4, "static analysis: structure flags, Theorem 1 and 3 verdicts, golden trace",
                criterion4(detail), detail);
    detail.clear();
    gate.report(5, "all four reference query classifications", criterion5(detail), detail);
    detail.clear();
    gate.report(6, "resolved answers {(a,b,e)} with (a,b,d) rejected", criterion6(detail),
                detail);
    detail.clear();
    gate.report(7, "500-case oracle equivalence in < 60 s", criterion7(detail), detail);
    detail.clear();
    gate.report(8, "edge/output invariants and 200-case theorem agreement",
                criterion8(detail), detail);
    detail.clear();
    gate.report(9, "similarity axioms over 1000 pairs per kind", criterion9(detail), detail);

    return gate.all_ok ? 0 : 1;
}
