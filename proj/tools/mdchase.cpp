// mdchase: static analysis and chase-based resolution for matching
// dependencies. Subcommands: analyze, classify, chase, resolve, answer.

#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "mdchase/mdchase.hpp"

namespace {

struct RunConfig {
    std::string mds_path;
    std::string instance_dir;
    std::string sims_path;
    std::string query_text;
    std::size_t depth = 0;  // 0 = automatic (|MDs| + 2)
    std::size_t node_cap = 100000;
    std::string modifiability = "conjunctive";
    std::string format = "human";
};

struct Loaded {
    std::shared_ptr<const mdchase::Schema> schema;
    std::shared_ptr<const mdchase::SimilarityRegistry> sims;
    mdchase::MDSet mds;
    std::unique_ptr<mdchase::Instance> instance;  // only when --instance given
};

// Schema comes from the instance CSV headers when an instance is given and
// is otherwise inferred from the relations and attributes the MD file
// mentions.
Loaded load(const RunConfig& cfg) {
    Loaded l;
    if (!cfg.sims_path.empty()) l.sims = mdchase::load_similarities(cfg.sims_path);
    else l.sims = std::make_shared<mdchase::SimilarityRegistry>();

    std::string md_text = mdchase::read_file(cfg.mds_path);
    if (!cfg.instance_dir.empty()) {
        l.instance = std::make_unique<mdchase::Instance>(mdchase::read_instance_dir(cfg.instance_dir));
        l.schema = l.instance->schema_ptr();
    } else {
        l.schema = mdchase::infer_schema_from_mds(md_text, cfg.mds_path);
    }
    l.mds = mdchase::parse_mds(md_text, l.schema, l.sims, cfg.mds_path);
    return l;
}

mdchase::ChaseOptions chase_options(const RunConfig& cfg) {
    mdchase::ChaseOptions opts;
    opts.depth_bound = cfg.depth;
    opts.node_cap = cfg.node_cap;
    opts.modifiability = mdchase::parse_modifiability(cfg.modifiability);
    return opts;
}

void emit(const RunConfig& cfg, const std::string& human, const mdchase::json& structured) {
    if (cfg.format == "structured") std::cout << structured.dump(2) << "\n";
    else std::cout << human;
}

int cmd_analyze(const RunConfig& cfg) {
    Loaded l = load(cfg);
    bool transitive = l.sims->all_transitive(l.mds.sim_names());
    mdchase::Verdict v = mdchase::hardness_verdict(l.mds, transitive);
    emit(cfg, mdchase::analyze_report_human(l.mds, v), mdchase::analyze_report_json(l.mds, v));
    return 0;
}

int cmd_classify(const RunConfig& cfg) {
    Loaded l = load(cfg);
    mdchase::ConjunctiveQuery q = mdchase::parse_query(cfg.query_text, *l.schema);
    emit(cfg, mdchase::classify_report_human(q, l.mds), mdchase::classify_report_json(q, l.mds));
    return 0;
}

int cmd_chase(const RunConfig& cfg) {
    Loaded l = load(cfg);
    mdchase::ChaseOptions opts = chase_options(cfg);
    opts.trace = true;
    mdchase::ResolvedSet r = mdchase::enumerate_resolved(*l.instance, l.mds, opts);
    emit(cfg, mdchase::chase_report_human(r), mdchase::chase_report_json(r));
    return r.exhausted ? 0 : 2;
}

int cmd_resolve(const RunConfig& cfg) {
    Loaded l = load(cfg);
    mdchase::MriResult r = mdchase::minimally_resolved(*l.instance, l.mds, chase_options(cfg));
    emit(cfg, mdchase::resolve_report_human(r), mdchase::resolve_report_json(r));
    return r.verified_minimal ? 0 : 2;
}

int cmd_answer(const RunConfig& cfg) {
    Loaded l = load(cfg);
    mdchase::ConjunctiveQuery q = mdchase::parse_query(cfg.query_text, *l.schema);
    mdchase::AnswerSet a = mdchase::resolved_answers(q, *l.instance, l.mds, chase_options(cfg));
    emit(cfg, mdchase::answer_report_human(a), mdchase::answer_report_json(a));
    return (a.truncated || a.indeterminate) ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"matching-dependency analysis and chase-based entity resolution"};
    app.require_subcommand(1);

    RunConfig cfg;
    auto add_common = [&](CLI::App* sub, bool needs_instance, bool needs_query) {
        sub->add_option("--mds", cfg.mds_path, "MD file")->required();
        auto* inst = sub->add_option("--instance", cfg.instance_dir,
                                     "instance directory of per-relation CSV files");
        if (needs_instance) inst->required();
        sub->add_option("--sims", cfg.sims_path, "similarity config (JSON)");
        auto* query = sub->add_option("--query", cfg.query_text, "conjunctive query");
        if (needs_query) query->required();
        sub->add_option("--depth", cfg.depth, "chase depth bound (default: number of MDs + 2)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--node-cap", cfg.node_cap, "chase node expansion cap")
            ->check(CLI::PositiveNumber);
        sub->add_option("--modifiability", cfg.modifiability,
                        "conjunctive (default) or disjunctive")
            ->check(CLI::IsMember({"conjunctive", "disjunctive"}));
        sub->add_option("--format", cfg.format, "human (default) or structured")
            ->check(CLI::IsMember({"human", "structured"}));
    };

    CLI::App* analyze = app.add_subcommand("analyze", "static hardness classification");
    add_common(analyze, false, false);
    CLI::App* classify = app.add_subcommand("classify", "query class (UJCQ / CHAQ)");
    add_common(classify, false, true);
    CLI::App* chase = app.add_subcommand("chase", "chase tree trace");
    add_common(chase, true, false);
    CLI::App* resolve = app.add_subcommand("resolve", "minimally resolved instances");
    add_common(resolve, true, false);
    CLI::App* answer = app.add_subcommand("answer", "resolved (certain) query answers");
    add_common(answer, true, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(cfg);
        if (classify->parsed()) return cmd_classify(cfg);
        if (chase->parsed()) return cmd_chase(cfg);
        if (resolve->parsed()) return cmd_resolve(cfg);
        if (answer->parsed()) return cmd_answer(cfg);
    } catch (const mdchase::input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const mdchase::structural_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
