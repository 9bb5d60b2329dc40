#include "cgmcts/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "cgmcts/harness.hpp"

namespace cgmcts {

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double population_stddev(std::span<const double> values) {
    if (values.empty()) return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size()));
}

RunSummary summarize(const RunLog& log, const std::string& name) {
    RunSummary s;
    s.name = name;
    std::map<int, double> per_round;
    std::optional<PriceMap> prices;
    for (const auto& r : log.records()) {
        s.total_tokens += r.tokens_in.value_or(0) + r.tokens_out.value_or(0);
        switch (r.event) {
            case EventKind::started:
                if (r.category) s.category = *r.category;
                if (r.n_problems) s.n_problems = static_cast<std::size_t>(*r.n_problems);
                if (r.prices) prices = r.prices;
                break;
            case EventKind::expanded:
                s.proposed += static_cast<std::size_t>(r.proposed.value_or(0));
                break;
            case EventKind::pruned:
                ++s.pruned;
                break;
            case EventKind::simulated: {
                ++s.simulations;
                const double reward = r.reward.value_or(0.0);
                auto [it, fresh] = per_round.emplace(r.round, reward);
                if (!fresh) it->second = std::max(it->second, reward);
                s.best_reward = std::max(s.best_reward, reward);
                break;
            }
            default:
                break;
        }
    }
    for (const auto& [round, score] : per_round) s.round_scores.push_back(score);
    s.score_mean = mean(s.round_scores);
    s.score_stddev = population_stddev(s.round_scores);
    if (s.n_problems > 0) {
        s.tokens_per_problem = tokens_per_problem(log, s.n_problems);
        if (prices) s.cost = cost(log, *prices, s.n_problems);
    }
    return s;
}

double variance_ratio(const RunSummary& a, const RunSummary& b) {
    if (a.score_stddev == 0.0 && b.score_stddev == 0.0) return 1.0;
    if (b.score_stddev == 0.0) return std::numeric_limits<double>::infinity();
    return a.score_stddev / b.score_stddev;
}

std::string format_summary_table(const std::vector<RunSummary>& runs) {
    std::ostringstream out;
    out << std::left << std::setw(22) << "run" << std::setw(10) << "category" << std::right << std::setw(8) << "best"
        << std::setw(8) << "mean" << std::setw(8) << "std" << std::setw(7) << "sims" << std::setw(9) << "pruned%"
        << std::setw(12) << "tok/prob" << std::setw(12) << "cost/prob" << "\n";
    out << std::fixed;
    for (const auto& r : runs) {
        out << std::left << std::setw(22) << r.name << std::setw(10) << r.category << std::right
            << std::setprecision(3) << std::setw(8) << r.best_reward << std::setw(8) << r.score_mean << std::setw(8)
            << r.score_stddev << std::setw(7) << r.simulations << std::setprecision(1) << std::setw(9)
            << 100.0 * r.pruning_rate() << std::setw(12) << r.tokens_per_problem;
        if (r.cost) {
            out << std::setprecision(6) << std::setw(12) << *r.cost;
        } else {
            out << std::setw(12) << "-";
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace cgmcts
