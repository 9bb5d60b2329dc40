// Command-line front end: run, report, export, ablate, serve.
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cgmcts/adapter.hpp"
#include "cgmcts/app.hpp"
#include "cgmcts/errors.hpp"
#include "cgmcts/report.hpp"

namespace fs = std::filesystem;
using namespace cgmcts;

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string executor;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "JSON run configuration");
    cmd->add_option("--seed", opts.seed, "random seed (default 42)");
    cmd->add_option("--executor", opts.executor, "synthetic | external:ADDR");
}

RunConfig resolve(const CommonOptions& opts) {
    RunConfig config = opts.config_path.empty() ? RunConfig{} : load_config(opts.config_path);
    if (opts.seed) config.search.budget.seed = *opts.seed;
    if (!opts.executor.empty()) config.executor = opts.executor;
    validate_config(config);
    return config;
}

std::vector<RunSummary> summaries_for(const RunOutcome& outcome, const std::string& prefix) {
    std::vector<RunSummary> out;
    for (const auto& co : outcome.categories) {
        auto s = summarize(co.log, prefix.empty() ? co.category : prefix);
        s.best_reward = co.validation_reward;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"constraint-guided MCTS over operator-DAG workflows"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    std::string run_out = "out";
    auto* run = app.add_subcommand("run", "optimise a workload and write artifacts");
    add_common(run, run_opts);
    run->add_option("--out", run_out, "output directory");

    std::vector<std::string> logs;
    auto* report = app.add_subcommand("report", "summarise run logs");
    report->add_option("logs", logs, "NDJSON run logs")->required()->check(CLI::ExistingFile);

    CommonOptions export_opts;
    std::string export_out;
    std::string export_program;
    std::string export_category = "cat0";
    auto* exp = app.add_subcommand("export", "write the best workflow of a run (or re-export a program)");
    add_common(exp, export_opts);
    exp->add_option("--out", export_out, "destination file")->required();
    exp->add_option("--program", export_program, "existing workflow JSON to validate and re-export");
    exp->add_option("--category", export_category, "category whose best workflow is exported");

    CommonOptions ablate_opts;
    std::string ablate_out = "ablation";
    auto* ablate = app.add_subcommand("ablate", "run the family/stage ablation grid");
    add_common(ablate, ablate_opts);
    ablate->add_option("--out", ablate_out, "output directory");

    CommonOptions serve_opts;
    auto* serve = app.add_subcommand("serve", "answer adapter requests on stdin/stdout with the synthetic roles");
    add_common(serve, serve_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto config = resolve(run_opts);
            auto outcome = execute_run(config, run_out);
            std::cout << format_summary_table(summaries_for(outcome, ""));
            for (const auto& co : outcome.categories)
                std::cout << co.category << ": validation " << co.validation_reward << ", test " << co.test_reward
                          << "\n";
            std::cout << "artifacts written to " << fs::path(run_out).string() << "\n";
        } else if (*report) {
            std::vector<RunSummary> runs;
            for (const auto& path : logs) runs.push_back(summarize(RunLog::load(path), fs::path(path).stem().string()));
            std::cout << format_summary_table(runs);
            if (runs.size() >= 2)
                std::cout << "variance ratio " << runs[0].name << "/" << runs[1].name << ": "
                          << variance_ratio(runs[0], runs[1]) << "\n";
        } else if (*exp) {
            auto config = resolve(export_opts);
            const auto registry = OperatorRegistry::from_names(config.suite.registry);
            if (!export_program.empty()) {
                export_workflow(load_program(export_program), registry, export_out);
            } else {
                auto outcome = optimize(config);
                const CategoryOutcome* chosen = nullptr;
                for (const auto& co : outcome.categories)
                    if (co.category == export_category) chosen = &co;
                if (!chosen) throw InputError("no category '" + export_category + "'");
                export_workflow(chosen->result.best, registry, export_out);
            }
            std::cout << "wrote " << export_out << "\n";
        } else if (*ablate) {
            auto base = resolve(ablate_opts);
            std::vector<RunSummary> rows;
            for (const auto& [name, config] : ablation_grid(base)) {
                auto outcome = execute_run(config, fs::path(ablate_out) / name);
                for (auto& s : summaries_for(outcome, name)) rows.push_back(std::move(s));
            }
            std::cout << format_summary_table(rows);
        } else if (*serve) {
            auto config = resolve(serve_opts);
            config.executor = "synthetic";
            const auto registry = OperatorRegistry::from_names(config.suite.registry);
            auto roles = make_roles(config, registry);
            std::string line;
            while (std::getline(std::cin, line)) {
                if (line.empty()) continue;
                nlohmann::json reply;
                try {
                    reply = handle_request(nlohmann::json::parse(line), *roles.proposer, *roles.evaluator);
                } catch (const nlohmann::json::exception& e) {
                    reply = {{"error", std::string("malformed request: ") + e.what()}};
                }
                std::cout << reply.dump() << "\n" << std::flush;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
