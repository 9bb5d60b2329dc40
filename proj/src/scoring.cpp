#include "cgmcts/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "cgmcts/analysis.hpp"

namespace cgmcts {

ComplianceScorer::ComplianceScorer(OperatorRegistry registry, DepthDiversityConfig depth_diversity,
                                   MagnitudeConfig magnitude, FamilyMask mask)
    : registry_(std::move(registry)), depth_diversity_(depth_diversity), magnitude_(magnitude), mask_(mask) {}

double ComplianceScorer::pattern(const WorkflowState& state, const std::string& category,
                                 const MotifLibrary& lib) const {
    return score_pattern(state, registry_, category, lib);
}

ConstraintVector ComplianceScorer::static_scores(const WorkflowProgram& program, const WorkflowState& state,
                                                 const std::string& category, const MotifLibrary& lib) const {
    ConstraintVector c;
    const auto analysis = analyze_program(program, registry_);
    c[Family::units] = mask_[Family::units] ? score_units(analysis) : kNeutralScore;
    c[Family::types] = mask_[Family::types] ? score_types(analysis) : kNeutralScore;
    c[Family::pattern] = mask_[Family::pattern] ? pattern(state, category, lib) : kNeutralScore;
    c[Family::magnitude] = mask_[Family::magnitude] ? 1.0 : kNeutralScore;
    c[Family::depth] = mask_[Family::depth] ? score_depth(state, depth_diversity_) : kNeutralScore;
    c[Family::diversity] = mask_[Family::diversity] ? score_diversity(state, registry_.size()) : kNeutralScore;
    return c;
}

double ComplianceScorer::measured_magnitude(const std::vector<ExecutionTrace>& traces) const {
    double max_x = 0.0;
    double max_v = 0.0;
    bool any = false;
    for (const auto& t : traces) {
        for (double x : t.intermediates) {
            max_x = std::max(max_x, std::abs(x));
            any = true;
        }
        for (double v : t.inputs) max_v = std::max(max_v, std::abs(v));
    }
    if (!any) return 1.0;
    return score_magnitude(max_x, max_v, magnitude_);
}

}  // namespace cgmcts
