#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cgmcts/run_log.hpp"

namespace cgmcts {

double mean(std::span<const double> values);
/// Population standard deviation; 0 for fewer than one value.
double population_stddev(std::span<const double> values);

struct RunSummary {
    std::string name;
    std::string category;
    std::vector<double> round_scores;  ///< best validation reward simulated in each round
    double score_mean = 0.0;
    double score_stddev = 0.0;
    std::size_t proposed = 0;
    std::size_t pruned = 0;
    std::size_t simulations = 0;
    double best_reward = 0.0;
    std::int64_t total_tokens = 0;
    std::size_t n_problems = 0;
    double tokens_per_problem = 0.0;
    std::optional<double> cost;

    [[nodiscard]] double pruning_rate() const noexcept {
        return proposed > 0 ? static_cast<double>(pruned) / static_cast<double>(proposed) : 0.0;
    }
};

/// Pure function of the log. n_problems and prices come from the "started" record when present.
RunSummary summarize(const RunLog& log, const std::string& name = "run");

/// sigma_a / sigma_b of per-round validation scores (1 when both are zero).
double variance_ratio(const RunSummary& a, const RunSummary& b);

std::string format_summary_table(const std::vector<RunSummary>& runs);

}  // namespace cgmcts
