#include "cgmcts/interpreter.hpp"

#include <algorithm>

#include "cgmcts/errors.hpp"

namespace cgmcts {

ExecutionTrace interpret(const WorkflowProgram& program, const OperatorRegistry& registry,
                         const InputBinding& inputs) {
    require_valid(program, registry);
    ExecutionTrace trace;

    std::map<NodeId, double> values;
    for (NodeId r : program.roots) {
        const Node& node = *program.find(r);
        double v = 0.0;
        if (node.op == kConstOp) {
            v = *node.value;
        } else {
            auto it = inputs.find(r);
            if (it == inputs.end()) throw InputError("no input bound for root " + std::to_string(r));
            v = it->second;
        }
        trace.inputs.push_back(v);
    }

    for (NodeId id : topological_order(program)) {
        const Node& node = *program.find(id);
        trace.evaluation_order.push_back(id);
        if (is_source_op(node.op)) {
            auto pos = std::find(program.roots.begin(), program.roots.end(), id);
            values[id] = trace.inputs[static_cast<std::size_t>(pos - program.roots.begin())];
            continue;
        }
        const OperatorKind& kind = registry.at(node.op);
        std::vector<double> operands;
        operands.reserve(kind.arity);
        for (const auto& src : node_inputs(program, id, kind.arity)) operands.push_back(values.at(*src));
        auto outcome = apply_operator(kind.code, operands);
        if (!outcome.value) {
            trace.success = false;
            trace.failed_node = id;
            trace.failure = "node " + std::to_string(id) + " (" + node.op + "): " + outcome.violation;
            return trace;
        }
        values[id] = *outcome.value;
        trace.intermediates.push_back(*outcome.value);
    }

    trace.success = true;
    trace.output = values.at(program.output);
    if (trace.intermediates.empty()) trace.intermediates.push_back(*trace.output);
    return trace;
}

}  // namespace cgmcts
