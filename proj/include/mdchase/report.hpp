#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mdchase/analysis.hpp"
#include "mdchase/answer.hpp"
#include "mdchase/chase.hpp"
#include "mdchase/instance.hpp"
#include "mdchase/io.hpp"
#include "mdchase/md.hpp"
#include "mdchase/query.hpp"

// Report rendering. Every command has a human text form and a structured
// JSON form; both are deterministic (sorted keys, canonical orderings).

namespace mdchase {

using json = nlohmann::json;

namespace detail {

inline std::string yn(bool b) { return b ? "true" : "false"; }

inline json attrs_json(const AttrSet& s) {
    json a = json::array();
    for (const AttrRef& r : s) a.push_back(r.str());
    return a;
}

inline json instance_json(const Instance& d) {
    json out = json::object();
    for (const auto& [rel, ts] : d.relations()) {
        const RelationDef& def = d.schema().require(rel);
        json rows = json::array();
        for (const auto& [tid, tuple] : ts) {
            json row = json::object();
            row["_tid"] = tid;
            for (std::size_t i = 0; i < def.attrs.size(); ++i)
                row[def.attrs[i]] = tuple[i].display();
            rows.push_back(std::move(row));
        }
        out[rel] = std::move(rows);
    }
    return out;
}

// Compact one-line instance form for trace output.
inline std::string instance_line(const Instance& d) {
    std::string s;
    bool first_rel = true;
    for (const auto& [rel, ts] : d.relations()) {
        if (!first_rel) s += "; ";
        first_rel = false;
        s += rel + "(";
        bool first_t = true;
        for (const auto& [tid, tuple] : ts) {
            if (!first_t) s += " | ";
            first_t = false;
            s += "t" + std::to_string(tid) + ": ";
            for (std::size_t i = 0; i < tuple.size(); ++i) {
                if (i) s += ",";
                s += tuple[i].display();
            }
        }
        s += ")";
    }
    return s;
}

inline std::string instance_csv_block(const Instance& d, const std::string& indent) {
    std::string out;
    for (const auto& [rel, ts] : d.relations()) {
        out += indent + rel + ":\n";
        std::string csv = write_relation_csv(d, rel);
        std::size_t start = 0;
        while (start < csv.size()) {
            std::size_t end = csv.find('\n', start);
            if (end == std::string::npos) end = csv.size();
            out += indent + "  " + csv.substr(start, end - start) + "\n";
            start = end + 1;
        }
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------- analyze

inline std::string analyze_report_human(const MDSet& m, const Verdict& v) {
    std::string out = "mds:\n";
    for (const auto& md : m.mds) out += "  " + print_md(md) + "\n";

    out += "graph:\n";
    MDGraph g = build_mdg(m);
    bool any = false;
    for (std::size_t i = 0; i < g.ids.size(); ++i)
        for (std::size_t j = 0; j < g.ids.size(); ++j)
            if (g.has_edge(i, j)) {
                out += "  " + g.ids[i] + " -> " + g.ids[j] + "\n";
                any = true;
            }
    if (!any) out += "  no edges\n";

    out += "structure:\n";
    out += "  acyclic: " + detail::yn(v.structure.acyclic) + "\n";
    out += "  interacting: " + detail::yn(v.structure.interacting) + "\n";
    out += "  pair-preserving: " + detail::yn(v.structure.pair_preserving) + "\n";
    if (v.structure.linear_pair) {
        auto [i1, i2] = *v.structure.linear_pair;
        out += "  linear pair: (" + m.mds[i1].id + ", " + m.mds[i2].id + ")\n";
    }

    out += "components:\n";
    for (const auto& md : m.mds) {
        for (Side side : {Side::L, Side::R}) {
            AttributePartition part = components(md, side);
            out += "  " + md.id + (side == Side::L ? " L" : " R") + "-components:";
            for (const auto& cls : part.classes) out += " " + detail::attrs_str(cls);
            out += "\n";
        }
    }

    if (v.thm1_applicable && v.structure.linear_pair) {
        auto [i1, i2] = *v.structure.linear_pair;
        out += "equivalent sets:\n";
        for (const auto& es : equivalent_sets(m.mds[i1], m.mds[i2]))
            out += "  " + es.rel + "-ES " + detail::attrs_str(es.attrs) + " " +
                   (es.bound ? "bound" : "not bound") + "\n";
    }

    out += "derivation:\n";
    for (std::size_t i = 0; i + 1 < v.trace.size(); ++i) out += "  " + v.trace[i] + "\n";
    out += v.trace.back() + "\n";  // "verdict: ..." unindented, last line
    return out;
}

inline json analyze_report_json(const MDSet& m, const Verdict& v) {
    json out;
    json mds = json::array();
    for (const auto& md : m.mds) mds.push_back({{"id", md.id}, {"text", print_md(md)}});
    out["mds"] = std::move(mds);

    MDGraph g = build_mdg(m);
    json edges = json::array();
    for (std::size_t i = 0; i < g.ids.size(); ++i)
        for (std::size_t j = 0; j < g.ids.size(); ++j)
            if (g.has_edge(i, j)) edges.push_back({g.ids[i], g.ids[j]});
    out["graph"] = {{"ids", g.ids}, {"edges", std::move(edges)}};

    json structure = {{"acyclic", v.structure.acyclic},
                      {"interacting", v.structure.interacting},
                      {"pair_preserving", v.structure.pair_preserving},
                      {"has_self_loop", v.structure.has_self_loop}};
    if (v.structure.linear_pair) {
        auto [i1, i2] = *v.structure.linear_pair;
        structure["linear_pair"] = {m.mds[i1].id, m.mds[i2].id};
    } else {
        structure["linear_pair"] = nullptr;
    }
    out["structure"] = std::move(structure);

    json comps = json::array();
    for (const auto& md : m.mds) {
        for (Side side : {Side::L, Side::R}) {
            json classes = json::array();
            for (const auto& cls : components(md, side).classes)
                classes.push_back(detail::attrs_json(cls));
            comps.push_back({{"md", md.id},
                             {"side", side == Side::L ? "L" : "R"},
                             {"classes", std::move(classes)}});
        }
    }
    out["components"] = std::move(comps);

    json ess = json::array();
    if (v.thm1_applicable && v.structure.linear_pair) {
        auto [i1, i2] = *v.structure.linear_pair;
        for (const auto& es : equivalent_sets(m.mds[i1], m.mds[i2]))
            ess.push_back({{"rel", es.rel},
                           {"attrs", detail::attrs_json(es.attrs)},
                           {"bound", es.bound}});
    }
    out["equivalent_sets"] = std::move(ess);

    json conds = json::array();
    for (const auto& c : v.thm1)
        conds.push_back({{"label", std::string(1, c.label)},
                         {"rel", c.rel},
                         {"i", c.i},
                         {"ii", c.ii},
                         {"iii", c.iii},
                         {"holds", c.holds()}});
    out["thm1"] = {{"applicable", v.thm1_applicable},
                   {"disjoint_rhs", v.disjoint_rhs},
                   {"conditions", std::move(conds)},
                   {"hard", v.thm1_hard}};

    json wits = json::array();
    for (const auto& w : v.thm3_witnesses)
        wits.push_back({{"m1", w.m1}, {"m2", w.m2}, {"b", w.b.str()}, {"c", w.c.str()}});
    out["thm3"] = {{"applicable", v.thm3_applicable}, {"witnesses", std::move(wits)}};

    out["verdict"] = {{"outcome", to_string(v.outcome)},
                      {"basis", to_string(v.basis)},
                      {"witness", v.witness}};
    out["trace"] = v.trace;
    return out;
}

// ---------------------------------------------------------------- classify

inline std::string classify_report_human(const ConjunctiveQuery& q, const MDSet& m) {
    QueryClass c = classify_query(q, m);
    std::string out = "query: " + print_query(q) + "\n";
    out += "changeable attributes: " + detail::attrs_str(changeable_attributes(m)) + "\n";
    out += "joins avoid changeable attributes (UJCQ): " + detail::yn(is_ujcq(q, m)) + "\n";
    out += "has a free occurrence of an MD relation: " + detail::yn(has_free_occurrence(q, m)) +
           "\n";
    out += to_string(c) + "\n";  // class string alone on the last line
    return out;
}

inline json classify_report_json(const ConjunctiveQuery& q, const MDSet& m) {
    return {{"query", print_query(q)},
            {"changeable_attributes", detail::attrs_json(changeable_attributes(m))},
            {"ujcq", is_ujcq(q, m)},
            {"free_occurrence", has_free_occurrence(q, m)},
            {"class", to_string(classify_query(q, m))}};
}

// ---------------------------------------------------------------- chase

inline std::string chase_report_human(const ResolvedSet& r) {
    std::string out = "chase tree:\n";
    for (const TraceNode& t : r.tree.nodes) {
        std::string indent(2 * (t.depth + 1), ' ');
        out += indent + "#" + std::to_string(t.id);
        if (t.id == t.parent) out += " root";
        else out += " <- #" + std::to_string(t.parent) + " via " + t.assignment;
        if (!t.edge_valid) out += " [INVALID STEP]";
        if (t.resolved) out += " [resolved]";
        if (t.duplicate) out += " [duplicate]";
        if (t.at_bound) out += " [at depth bound, unresolved]";
        out += "\n" + indent + "  " + detail::instance_line(t.instance) + "\n";
        for (const auto& de : t.dead_ends) out += indent + "  dead end: " + de + "\n";
    }
    out += "summary:\n";
    out += "  nodes expanded: " + std::to_string(r.nodes_expanded) + "\n";
    out += "  resolved instances: " + std::to_string(r.instances.size()) + "\n";
    out += "  dead ends: " + std::to_string(r.dead_end_count) + "\n";
    out += "  exhausted: " + detail::yn(r.exhausted) + "\n";
    out += "  truncated at depth bound: " + detail::yn(r.truncated) + "\n";
    out += "  node cap reached: " + detail::yn(r.budget_exceeded) + "\n";
    return out;
}

inline json chase_report_json(const ResolvedSet& r) {
    json nodes = json::array();
    for (const TraceNode& t : r.tree.nodes) {
        nodes.push_back({{"id", t.id},
                         {"parent", t.parent},
                         {"depth", t.depth},
                         {"assignment", t.assignment},
                         {"edge_valid", t.edge_valid},
                         {"resolved", t.resolved},
                         {"duplicate", t.duplicate},
                         {"at_bound", t.at_bound},
                         {"dead_ends", t.dead_ends},
                         {"instance", detail::instance_json(t.instance)}});
    }
    return {{"nodes", std::move(nodes)},
            {"summary",
             {{"nodes_expanded", r.nodes_expanded},
              {"resolved_instances", r.instances.size()},
              {"dead_ends", r.dead_end_count},
              {"exhausted", r.exhausted},
              {"truncated", r.truncated},
              {"budget_exceeded", r.budget_exceeded}}}};
}

// ---------------------------------------------------------------- resolve

inline std::string resolve_report_human(const MriResult& r) {
    std::string out;
    if (r.mris.empty()) {
        out += "no resolved instance found within bounds\n";
    } else {
        out += "minimally resolved instances: " + std::to_string(r.mris.size()) +
               " at change count " + std::to_string(r.min_changes) + "\n";
        for (std::size_t i = 0; i < r.mris.size(); ++i) {
            out += "MRI " + std::to_string(i + 1) + " (changes " +
                   std::to_string(r.mris[i].changes) + ", depth " +
                   std::to_string(r.mris[i].depth) + "):\n";
            out += detail::instance_csv_block(r.mris[i].instance, "  ");
        }
    }
    out += "summary:\n";
    out += "  resolved instances found: " + std::to_string(r.all.instances.size()) + "\n";
    out += "  minimality verified: " + detail::yn(r.verified_minimal) + "\n";
    out += "  truncated at depth bound: " + detail::yn(r.all.truncated) + "\n";
    out += "  node cap reached: " + detail::yn(r.all.budget_exceeded) + "\n";
    return out;
}

inline json resolve_report_json(const MriResult& r) {
    json mris = json::array();
    for (const auto& ri : r.mris)
        mris.push_back({{"changes", ri.changes},
                        {"depth", ri.depth},
                        {"instance", detail::instance_json(ri.instance)}});
    json all = json::array();
    for (const auto& ri : r.all.instances)
        all.push_back({{"changes", ri.changes},
                       {"depth", ri.depth},
                       {"instance", detail::instance_json(ri.instance)}});
    return {{"mris", std::move(mris)},
            {"min_changes", r.min_changes},
            {"verified_minimal", r.verified_minimal},
            {"resolved", std::move(all)},
            {"search",
             {{"exhausted", r.all.exhausted},
              {"truncated", r.all.truncated},
              {"budget_exceeded", r.all.budget_exceeded},
              {"nodes_expanded", r.all.nodes_expanded},
              {"dead_ends", r.all.dead_end_count}}}};
}

// ---------------------------------------------------------------- answer

inline std::string answer_report_human(const AnswerSet& a) {
    std::string out;
    std::string header;
    for (std::size_t i = 0; i < a.head.size(); ++i) {
        if (i) header += ",";
        header += csv_quote(a.head[i]);
    }
    out += header + "\n";
    for (const auto& row : a.tuples) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line += ",";
            line += csv_quote(row[i].display());
        }
        out += line + "\n";
    }
    out += "provenance: " + a.provenance + "\n";
    if (a.indeterminate) out += "indeterminate: true\n";
    return out;
}

inline json answer_report_json(const AnswerSet& a) {
    json tuples = json::array();
    for (const auto& row : a.tuples) {
        json t = json::array();
        for (const Value& v : row) t.push_back(v.display());
        tuples.push_back(std::move(t));
    }
    return {{"head", a.head},
            {"tuples", std::move(tuples)},
            {"provenance", a.provenance},
            {"truncated", a.truncated},
            {"indeterminate", a.indeterminate},
            {"mri_count", a.mri_count},
            {"min_changes", a.min_changes}};
}

}  // namespace mdchase
