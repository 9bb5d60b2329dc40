#include "cgmcts/app.hpp"

#include <fstream>

#include "cgmcts/adapter.hpp"
#include "cgmcts/errors.hpp"
#include "cgmcts/random.hpp"
#include "cgmcts/report.hpp"

namespace cgmcts {

using nlohmann::json;

Workload build_workload(const RunConfig& config) {
    Workload w;
    if (config.problem_file) {
        w.registry = OperatorRegistry::from_names(config.suite.registry);
        std::ifstream in(*config.problem_file);
        if (!in) throw ConfigError("cannot open problem file '" + *config.problem_file + "'");
        try {
            w.problems = problems_from_json(json::parse(in));
        } catch (const json::exception& e) {
            throw ParseError(*config.problem_file + ": " + e.what());
        }
        w.initial = load_program(*config.initial_program);
        require_valid(w.initial, w.registry);
    } else {
        auto suite = make_synthetic_suite(config.seed(), config.problem_count, config.category_count, config.suite);
        w.registry = suite.registry;
        w.initial = suite.initial;
        w.problems = suite.problems;
        w.targets = suite.targets;
    }
    w.categories = w.problems.validation.categories();
    if (w.categories.empty()) throw ConfigError("no validation problems");
    return w;
}

Roles make_roles(const RunConfig& config, const OperatorRegistry& registry) {
    Roles roles;
    if (config.executor == "synthetic") {
        roles.proposer = std::make_unique<SyntheticProposer>(registry, ProposerOptions{config.suite.max_program_operators});
        roles.evaluator = std::make_unique<SyntheticEvaluator>(registry, config.tolerance);
    } else if (config.executor.rfind("external:", 0) == 0) {
        auto transport = make_transport(config.executor.substr(9));
        roles.proposer = std::make_unique<RemoteProposer>(transport);
        roles.evaluator = std::make_unique<RemoteEvaluator>(transport);
    } else {
        throw ConfigError("unknown executor '" + config.executor + "'");
    }
    return roles;
}

SearchSettings effective_settings(const RunConfig& config) { return config.search; }

RunOutcome optimize(const RunConfig& config) {
    validate_config(config);
    Workload w = build_workload(config);
    Roles roles = make_roles(config, w.registry);
    const auto settings = effective_settings(config);

    MotifLibrary library = init_templates(w.registry.names(), w.categories, config.templates_per_category,
                                          derive_seed(config.seed(), 7), config.motifs);
    RunOutcome outcome;
    outcome.n_problems = w.problems.validation.size() + w.problems.test.size();
    for (const auto& category : w.categories) {
        CategoryOutcome co;
        co.category = category;
        const ProblemSet validation = w.problems.validation.for_category(category);
        const ProblemSet test = w.problems.test.for_category(category);

        LogRecord start;
        start.event = EventKind::started;
        start.category = category;
        start.n_problems = static_cast<std::int64_t>(validation.size());
        start.prices = config.prices;
        co.log.append(std::move(start));

        GuidedSearch search(settings, w.registry, *roles.proposer, *roles.evaluator, library, validation, category,
                            co.log);
        co.result = search.run(w.initial);
        library = co.result.library;
        co.validation_reward = co.result.best_reward;
        if (!test.empty()) co.test_reward = roles.evaluator->evaluate(co.result.best, test).reward;
        outcome.categories.push_back(std::move(co));
    }
    outcome.library = library.frozen_copy();
    return outcome;
}

namespace {

json weights_json(const WeightVector& w) {
    json out = json::object();
    for (auto f : kAllFamilies) out[std::string(family_name(f))] = w[f];
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace

RunOutcome execute_run(const RunConfig& config, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create '" + out_dir.string() + "': " + ec.message());

    RunOutcome outcome = optimize(config);
    const auto registry = OperatorRegistry::from_names(config.suite.registry);
    json summary{{"seed", config.seed()}, {"n_problems", outcome.n_problems}, {"categories", json::array()}};
    for (const auto& co : outcome.categories) {
        co.log.save((out_dir / ("runlog_" + co.category + ".ndjson")).string());
        export_workflow(co.result.best, registry, out_dir / ("best_workflow_" + co.category + ".json"));
        const RunSummary s = summarize(co.log, co.category);
        json entry{{"category", co.category},
                   {"best_node_id", co.result.best_node_id},
                   {"validation_reward", co.validation_reward},
                   {"test_reward", co.test_reward},
                   {"best_compliance", co.result.best_compliance},
                   {"simulations", co.result.simulations},
                   {"proposed", co.result.proposed},
                   {"pruned", co.result.pruned},
                   {"pruning_rate", co.result.pruning_rate()},
                   {"round_scores", s.round_scores},
                   {"score_mean", s.score_mean},
                   {"score_stddev", s.score_stddev},
                   {"tokens_per_problem", s.tokens_per_problem},
                   {"final_weights", weights_json(co.result.weights)}};
        entry["cost_per_problem"] = s.cost ? json(*s.cost) : json(nullptr);
        summary["categories"].push_back(std::move(entry));
    }
    write_text(out_dir / "motifs.json", library_to_json(outcome.library).dump(2) + "\n");
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");
    return outcome;
}

std::vector<std::pair<std::string, RunConfig>> ablation_grid(const RunConfig& base) {
    std::vector<std::pair<std::string, RunConfig>> grid;
    for (auto f : kAllFamilies) {
        RunConfig c = base;
        c.search.families = FamilyMask::only(f);
        grid.emplace_back(std::string(family_name(f)) + "-only", c);
    }
    for (auto s : kAllStages) {
        RunConfig c = base;
        c.search.stages = StageMask::only(s);
        grid.emplace_back(std::string(stage_name(s)) + "-only", c);
    }
    RunConfig fixed = base;
    fixed.search.adaptive_weights = false;
    grid.emplace_back("fixed-weights", fixed);
    grid.emplace_back("full", base);
    return grid;
}

void export_workflow(const WorkflowProgram& program, const OperatorRegistry& registry,
                     const std::filesystem::path& path) {
    save_program(program, registry, path.string());
}

}  // namespace cgmcts
