#pragma once

// Builders and independent reference computations shared by the tests.
// The oracles below deliberately avoid the library's own numeric helpers.

#include <cmath>
#include <deque>
#include <set>
#include <string>
#include <vector>

#include "cgmcts/harness.hpp"

namespace testing_support {

using namespace cgmcts;

inline Node input(NodeId id, std::optional<UnitSignature> unit = std::nullopt) {
    Node n;
    n.id = id;
    n.op = std::string(kInputOp);
    n.unit = std::move(unit);
    return n;
}

inline Node constant(NodeId id, double value, std::optional<UnitSignature> unit = std::nullopt) {
    Node n;
    n.id = id;
    n.op = std::string(kConstOp);
    n.value = value;
    n.unit = std::move(unit);
    return n;
}

inline Node op(NodeId id, std::string name) {
    Node n;
    n.id = id;
    n.op = std::move(name);
    return n;
}

/// Roots are every source node, ascending.
inline WorkflowProgram program(std::vector<Node> nodes, std::vector<Edge> edges, NodeId output) {
    WorkflowProgram p;
    p.nodes = std::move(nodes);
    p.edges = std::move(edges);
    p.output = output;
    for (const auto& n : p.nodes)
        if (is_source_op(n.op)) p.roots.push_back(n.id);
    return canonicalize(p);
}

// weighted geometric mean, written out term by term
inline double oracle_aggregate(const std::vector<double>& c, const std::vector<double>& w, double eps) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        num += w[i] * std::log(c[i] + eps);
        den += w[i];
    }
    return std::exp(num / den);
}

inline std::vector<double> oracle_reweight(const std::vector<double>& w, const std::vector<double>& corr, double eta,
                                           double alpha) {
    std::vector<double> raw(w.size());
    double z = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        raw[i] = w[i] * std::exp(eta * corr[i]);
        z += raw[i];
    }
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        out[i] = (1.0 - alpha) * raw[i] / z + alpha / static_cast<double>(w.size());
    return out;
}

inline double oracle_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
        sxy += x[i] * y[i];
    }
    const double cov = sxy - sx * sy / n;
    const double vx = sxx - sx * sx / n;
    const double vy = syy - sy * sy / n;
    if (vx <= 1e-15 || vy <= 1e-15) return 0.0;
    return cov / std::sqrt(vx * vy);
}

/// Every program reachable from `initial` through repeated proposer edits (initial included).
inline std::vector<WorkflowProgram> reachable_programs(const SyntheticProposer& proposer,
                                                       const WorkflowProgram& initial, std::size_t limit = 100000) {
    std::vector<WorkflowProgram> all{initial};
    std::set<std::string> seen{program_to_string(relabel_operators(initial))};
    std::deque<WorkflowProgram> queue{initial};
    while (!queue.empty() && all.size() < limit) {
        auto current = queue.front();
        queue.pop_front();
        for (auto& next : proposer.enumerate(current)) {
            if (!seen.insert(program_to_string(next)).second) continue;
            all.push_back(next);
            queue.push_back(std::move(next));
        }
    }
    return all;
}

struct OracleResult {
    double best_reward = 0.0;
    std::size_t space = 0;
};

/// Brute force: evaluate every reachable program on the problems.
inline OracleResult brute_force_best(const SyntheticProposer& proposer, Evaluator& evaluator,
                                     const WorkflowProgram& initial, const ProblemSet& problems) {
    OracleResult r;
    auto all = reachable_programs(proposer, initial);
    r.space = all.size();
    for (const auto& p : all) r.best_reward = std::max(r.best_reward, evaluator.evaluate(p, problems).reward);
    return r;
}

}  // namespace testing_support
