#pragma once

#include <string>
#include <vector>

#include "cgmcts/constraints.hpp"
#include "cgmcts/motifs.hpp"

namespace cgmcts {

/// Assembles the six family scores for a candidate program.
class ComplianceScorer {
public:
    ComplianceScorer(OperatorRegistry registry, DepthDiversityConfig depth_diversity, MagnitudeConfig magnitude,
                     FamilyMask mask = {});

    /// Pre-execution vector: magnitude is 1 (nothing measured yet), disabled families 0.5.
    [[nodiscard]] ConstraintVector static_scores(const WorkflowProgram& program, const WorkflowState& state,
                                                 const std::string& category, const MotifLibrary& lib) const;

    /// Magnitude sanity pooled over traces: max |X_w| against max |V_in| across all of them.
    /// Returns 1 when no trace recorded an intermediate.
    [[nodiscard]] double measured_magnitude(const std::vector<ExecutionTrace>& traces) const;

    [[nodiscard]] double pattern(const WorkflowState& state, const std::string& category,
                                 const MotifLibrary& lib) const;

    [[nodiscard]] const FamilyMask& mask() const noexcept { return mask_; }
    [[nodiscard]] const OperatorRegistry& registry() const noexcept { return registry_; }

private:
    OperatorRegistry registry_;
    DepthDiversityConfig depth_diversity_;
    MagnitudeConfig magnitude_;
    FamilyMask mask_;
};

}  // namespace cgmcts
