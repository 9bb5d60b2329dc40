#include "cgmcts/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "cgmcts/errors.hpp"

namespace cgmcts {

std::string_view family_symbol(Family f) noexcept {
    static constexpr std::string_view symbols[] = {"U", "T", "P", "M", "D", "V"};
    return symbols[static_cast<int>(f)];
}

std::string_view family_name(Family f) noexcept {
    static constexpr std::string_view names[] = {"units", "types", "pattern", "magnitude", "depth", "diversity"};
    return names[static_cast<int>(f)];
}

bool ConstraintVector::in_unit_range() const { return (values >= 0.0).all() && (values <= 1.0).all(); }

bool FamilyMask::any() const { return std::any_of(enabled.begin(), enabled.end(), [](bool b) { return b; }); }

FamilyMask FamilyMask::only(Family f) {
    FamilyMask m;
    m.enabled.fill(false);
    m[f] = true;
    return m;
}

bool WeightVector::on_simplex(double tol) const {
    return (values > 0.0).all() && std::abs(values.sum() - 1.0) <= tol;
}

double score_depth(const WorkflowState& state, const DepthDiversityConfig& cfg) {
    double excess = std::max(0.0, static_cast<double>(state.depth) - static_cast<double>(cfg.d_max));
    return std::max(0.0, 1.0 - cfg.beta * excess);
}

double score_diversity(const WorkflowState& state, std::size_t registry_size) {
    if (registry_size < 2) throw ContractViolation("diversity needs a registry of at least two operators");
    const double total = static_cast<double>(state.operator_total());
    if (total == 0.0) return 0.0;
    double entropy = 0.0;
    for (const auto& [_, count] : state.operator_histogram) {
        if (count == 0) continue;
        double p = static_cast<double>(count) / total;
        entropy -= p * std::log(p);
    }
    return std::clamp(entropy / std::log(static_cast<double>(registry_size)), 0.0, 1.0);
}

double score_units(const ProgramAnalysis& analysis) {
    std::size_t checked = 0, passing = 0;
    for (const auto& c : analysis.checks) {
        if (!c.unit_checked) continue;
        ++checked;
        if (c.units_ok) ++passing;
    }
    if (checked == 0) return kNeutralScore;
    return static_cast<double>(passing) / static_cast<double>(checked);
}

double score_units(const WorkflowProgram& program, const OperatorRegistry& registry) {
    return score_units(analyze_program(program, registry));
}

double score_types(const ProgramAnalysis& analysis) {
    if (analysis.checks.empty()) return kNeutralScore;
    std::size_t passing = 0;
    for (const auto& c : analysis.checks)
        if (c.shape_ok && c.type_ok) ++passing;
    return static_cast<double>(passing) / static_cast<double>(analysis.checks.size());
}

double score_types(const WorkflowProgram& program, const OperatorRegistry& registry) {
    return score_types(analyze_program(program, registry));
}

double score_magnitude(double max_abs_intermediate, double max_abs_input, const MagnitudeConfig& cfg) {
    const double theta = max_abs_input * std::pow(10.0, cfg.gamma);
    if (!(theta > 0.0)) return kNeutralScore;
    if (max_abs_intermediate <= theta) return 1.0;
    return std::max(0.0, 1.0 - cfg.delta * (max_abs_intermediate - theta) / theta);
}

double score_magnitude(const ExecutionTrace& trace, const MagnitudeConfig& cfg) {
    double x = 0.0, v = 0.0;
    for (double a : trace.intermediates) x = std::max(x, std::abs(a));
    for (double a : trace.inputs) v = std::max(v, std::abs(a));
    return score_magnitude(x, v, cfg);
}

double aggregate(const ConstraintVector& c, const WeightVector& w, const AggregationConfig& cfg,
                 const FamilyMask& mask) {
    if (!c.in_unit_range()) throw ContractViolation("constraint score outside [0, 1]");
    double num = 0.0, den = 0.0;
    for (Family f : kAllFamilies) {
        if (!mask[f]) continue;
        num += w[f] * std::log(c[f] + cfg.epsilon);
        den += w[f];
    }
    if (!(den > 0.0)) throw ContractViolation("enabled constraint weights sum to zero");
    return std::exp(num / den);
}

double threshold(std::size_t depth, const ThresholdSchedule& sched) {
    return std::max(sched.tau_min, sched.tau0 - sched.decay_k * static_cast<double>(depth));
}

}  // namespace cgmcts
