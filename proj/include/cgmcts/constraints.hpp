#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

#include "cgmcts/analysis.hpp"
#include "cgmcts/interpreter.hpp"
#include "cgmcts/state.hpp"

namespace cgmcts {

/// The six constraint families, in storage order.
enum class Family : int { units = 0, types, pattern, magnitude, depth, diversity };

inline constexpr std::size_t kFamilyCount = 6;
inline constexpr std::array<Family, kFamilyCount> kAllFamilies{
    Family::units, Family::types, Family::pattern, Family::magnitude, Family::depth, Family::diversity};

using FamilyArray = Eigen::Array<double, kFamilyCount, 1>;

std::string_view family_symbol(Family f) noexcept;  ///< "U", "T", "P", "M", "D", "V"
std::string_view family_name(Family f) noexcept;    ///< "units", "types", ...

inline constexpr double kNeutralScore = 0.5;

/// Per-family compliance scores, each in [0, 1].
struct ConstraintVector {
    FamilyArray values = FamilyArray::Ones();

    double& operator[](Family f) { return values(static_cast<int>(f)); }
    double operator[](Family f) const { return values(static_cast<int>(f)); }
    [[nodiscard]] bool in_unit_range() const;

    friend bool operator==(const ConstraintVector& a, const ConstraintVector& b) {
        return (a.values == b.values).all();
    }
};

/// Which families take part in aggregation. Disabled families are logged at the
/// neutral score and drop out of both sums of the weighted geometric mean.
struct FamilyMask {
    std::array<bool, kFamilyCount> enabled{true, true, true, true, true, true};

    bool operator[](Family f) const { return enabled[static_cast<std::size_t>(f)]; }
    bool& operator[](Family f) { return enabled[static_cast<std::size_t>(f)]; }
    [[nodiscard]] bool any() const;
    static FamilyMask only(Family f);
};

/// Simplex weights over the six families.
struct WeightVector {
    FamilyArray values = FamilyArray::Constant(1.0 / kFamilyCount);

    static WeightVector uniform() { return {}; }
    double operator[](Family f) const { return values(static_cast<int>(f)); }
    [[nodiscard]] bool on_simplex(double tol = 1e-9) const;
};

struct AggregationConfig {
    double epsilon = 0.01;
    double lambda_shaping = 0.5;
    double uct_c = 1.414;
};

struct ThresholdSchedule {
    double tau0 = 0.6;
    double tau_min = 0.3;
    double decay_k = 0.05;
};

struct DepthDiversityConfig {
    int d_max = 15;
    double beta = 0.1;
};

struct MagnitudeConfig {
    int gamma = 2;
    double delta = 0.5;
};

/// max(0, 1 - beta * max(0, d - d_max)).
double score_depth(const WorkflowState& state, const DepthDiversityConfig& cfg);

/// Normalised Shannon entropy of the operator histogram over a registry of
/// `registry_size` operators. An empty histogram scores 0.
double score_diversity(const WorkflowState& state, std::size_t registry_size);

/// Fraction of unit-checked ops that are unit consistent; 0.5 when none are checked.
double score_units(const ProgramAnalysis& analysis);
double score_units(const WorkflowProgram& program, const OperatorRegistry& registry);

/// Fraction of operator nodes that are both shape-ok and type-ok; 0.5 without operators.
double score_types(const ProgramAnalysis& analysis);
double score_types(const WorkflowProgram& program, const OperatorRegistry& registry);

/// Magnitude sanity of intermediates relative to theta = max|V_in| * 10^gamma.
/// Returns the neutral 0.5 when theta is zero (empty or all-zero inputs).
double score_magnitude(const ExecutionTrace& trace, const MagnitudeConfig& cfg);
/// Same rule over pooled maxima of several traces.
double score_magnitude(double max_abs_intermediate, double max_abs_input, const MagnitudeConfig& cfg);

/// Weighted geometric mean exp(sum w_i ln(c_i + eps) / sum w_j) over enabled families.
/// Throws ContractViolation when a score leaves [0, 1] or the enabled weights sum to zero.
double aggregate(const ConstraintVector& c, const WeightVector& w, const AggregationConfig& cfg,
                 const FamilyMask& mask = {});

/// max(tau_min, tau0 - k * depth).
double threshold(std::size_t depth, const ThresholdSchedule& sched);

}  // namespace cgmcts
