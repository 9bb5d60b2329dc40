#include "cgmcts/state.hpp"

#include <algorithm>
#include <cmath>

#include "cgmcts/analysis.hpp"
#include "cgmcts/interpreter.hpp"

namespace cgmcts {

std::size_t WorkflowState::operator_total() const noexcept {
    std::size_t total = 0;
    for (const auto& [_, c] : operator_histogram) total += c;
    return total;
}

Eigen::VectorXd WorkflowState::histogram_vector(const OperatorRegistry& registry) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(registry.size()));
    for (const auto& [name, count] : operator_histogram)
        if (auto idx = registry.index_of(name)) v(static_cast<Eigen::Index>(*idx)) = static_cast<double>(count);
    return v;
}

WorkflowState derive_state(const WorkflowProgram& program, const OperatorRegistry& registry,
                           const ExecutionTrace* trace) {
    require_valid(program, registry);
    WorkflowState state;

    std::map<NodeId, std::size_t> longest;
    for (NodeId r : program.roots) longest[r] = 0;
    for (NodeId id : topological_order(program)) {
        for (const auto& e : program.edges) {
            if (e.from != id || !longest.contains(id)) continue;
            auto& d = longest[e.to];
            d = std::max(d, longest[id] + 1);
        }
    }
    state.depth = longest.at(program.output);

    for (const auto& n : program.nodes)
        if (!is_source_op(n.op)) ++state.operator_histogram[n.op];

    for (const auto& check : analyze_program(program, registry).checks)
        if (check.unit_checked) state.unit_tagged_ops.insert(check.node);

    if (trace) {
        double m = 0.0;
        for (double x : trace->intermediates) m = std::max(m, std::abs(x));
        state.magnitude_summary = m;
    }
    return state;
}

}  // namespace cgmcts
