#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cgmcts/program.hpp"

namespace cgmcts {

struct ExecutionTrace {
    std::vector<double> intermediates;  ///< X_w, one entry per evaluated operator node
    std::vector<double> inputs;         ///< V_in, source values in root order
    bool success = false;
    std::optional<double> output;
    std::vector<NodeId> evaluation_order;  ///< every node visited, sources included
    std::optional<NodeId> failed_node;
    std::string failure;
};

using InputBinding = std::map<NodeId, double>;

/// Evaluates the program in topological order.
///
/// A domain violation (sqrt of a negative, log of a non-positive, division by
/// zero, non-finite result) stops evaluation and returns success=false with the
/// partial trace. When the output is itself a source, its value is recorded as
/// the single intermediate so a successful trace is never empty.
/// Throws InputError when an input source has no binding.
ExecutionTrace interpret(const WorkflowProgram& program, const OperatorRegistry& registry,
                         const InputBinding& inputs);

}  // namespace cgmcts
