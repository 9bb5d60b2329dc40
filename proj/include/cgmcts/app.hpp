#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cgmcts/config.hpp"

namespace cgmcts {

/// Problems, registry and starting point for a run.
struct Workload {
    OperatorRegistry registry;
    WorkflowProgram initial;
    SplitProblems problems;
    std::vector<std::pair<std::string, WorkflowProgram>> targets;  ///< synthetic suites only
    std::vector<std::string> categories;
};

Workload build_workload(const RunConfig& config);

/// Proposer/evaluator pair selected by config.executor.
struct Roles {
    std::unique_ptr<Proposer> proposer;
    std::unique_ptr<Evaluator> evaluator;
};
Roles make_roles(const RunConfig& config, const OperatorRegistry& registry);

SearchSettings effective_settings(const RunConfig& config);

struct CategoryOutcome {
    std::string category;
    SearchResult result;
    double validation_reward = 0.0;
    double test_reward = 0.0;  ///< best program on the test split
    RunLog log;
};

struct RunOutcome {
    std::vector<CategoryOutcome> categories;
    MotifLibrary library;  ///< frozen snapshot after optimisation
    std::size_t n_problems = 0;
};

/// Optimises every category in memory (no files written).
RunOutcome optimize(const RunConfig& config);

/// optimize() plus artifacts in `out_dir`: runlog_<cat>.ndjson, best_workflow_<cat>.json,
/// motifs.json and summary.json.
RunOutcome execute_run(const RunConfig& config, const std::filesystem::path& out_dir);

/// Six family-only variants, four stage-only variants, fixed weights and the full engine.
std::vector<std::pair<std::string, RunConfig>> ablation_grid(const RunConfig& base);

/// Validates before touching the filesystem; throws StructuralError or Error on I/O failure.
void export_workflow(const WorkflowProgram& program, const OperatorRegistry& registry,
                     const std::filesystem::path& path);

}  // namespace cgmcts
