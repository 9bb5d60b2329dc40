#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>

#include <Eigen/Dense>

#include "cgmcts/program.hpp"

namespace cgmcts {

struct ExecutionTrace;

/// Lightweight view of a program consumed by constraint scoring.
struct WorkflowState {
    std::size_t depth = 0;  ///< longest root->output path, in edges
    std::map<std::string, std::size_t> operator_histogram;
    std::set<NodeId> unit_tagged_ops;
    std::optional<double> magnitude_summary;  ///< max |X_w| when derived from a trace

    [[nodiscard]] std::size_t operator_total() const noexcept;
    /// Raw counts laid out in registry order.
    [[nodiscard]] Eigen::VectorXd histogram_vector(const OperatorRegistry& registry) const;

    friend bool operator==(const WorkflowState&, const WorkflowState&) = default;
};

/// Throws StructuralError for invalid programs.
WorkflowState derive_state(const WorkflowProgram& program, const OperatorRegistry& registry,
                           const ExecutionTrace* trace = nullptr);

}  // namespace cgmcts
