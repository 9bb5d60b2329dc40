#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cgmcts/harness.hpp"
#include "cgmcts/scoring.hpp"
#include "cgmcts/weighting.hpp"

namespace cgmcts {

enum class Stage { selection = 0, expansion, simulation, backprop };
inline constexpr std::array<Stage, 4> kAllStages{Stage::selection, Stage::expansion, Stage::simulation,
                                                 Stage::backprop};
std::string_view stage_name(Stage s) noexcept;

/// Where compliance shaping is injected. Off means: selection -> exp term is 1,
/// expansion -> no gate, simulation -> magnitude pinned to 1, backprop -> raw reward credited.
struct StageMask {
    std::array<bool, 4> enabled{true, true, true, true};

    bool operator[](Stage s) const { return enabled[static_cast<std::size_t>(s)]; }
    bool& operator[](Stage s) { return enabled[static_cast<std::size_t>(s)]; }
    [[nodiscard]] bool any() const;
    static StageMask only(Stage s);
};

struct SearchBudget {
    int rounds = 15;
    int simulations_per_round = 4;  ///< select/expand/simulate/backprop iterations per round
    std::size_t max_candidates_per_expansion = 8;
    std::uint64_t seed = 42;
};

struct SearchSettings {
    AggregationConfig aggregation;
    ThresholdSchedule schedule;
    DepthDiversityConfig depth_diversity;
    MagnitudeConfig magnitude;
    AdaptationConfig adaptation;
    bool adaptive_weights = true;
    std::size_t observation_window = 10;
    SearchBudget budget;
    FamilyMask families;
    StageMask stages;
    bool parallel_simulations = false;
};

struct SearchNode {
    std::int64_t id = 0;  ///< log identifier, shared with candidate ids
    WorkflowProgram program;
    WorkflowState state;
    std::size_t visits = 0;
    double total_value = 0.0;
    std::size_t own_simulations = 0;
    double reward_sum = 0.0;  ///< raw rewards of this node's own simulations
    double compliance = 0.0;  ///< most recently recomputed C_total
    ConstraintVector scores;  ///< static scores, magnitude replaced once measured
    bool magnitude_measured = false;
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;
    std::size_t depth = 0;  ///< tree depth, root = 0
    bool expanded = false;
    bool terminal = false;

    [[nodiscard]] double q_value() const noexcept {
        return visits > 0 ? total_value / static_cast<double>(visits) : 0.0;
    }
    [[nodiscard]] double mean_reward() const noexcept {
        return own_simulations > 0 ? reward_sum / static_cast<double>(own_simulations) : 0.0;
    }
};

/// Arena-backed search tree; node 0 is the root.
class SearchTree {
public:
    std::size_t add_root(SearchNode node);
    std::size_t add_child(std::size_t parent, SearchNode node);

    [[nodiscard]] const SearchNode& operator[](std::size_t i) const { return nodes_.at(i); }
    SearchNode& operator[](std::size_t i) { return nodes_.at(i); }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] bool empty() const noexcept { return nodes_.empty(); }
    [[nodiscard]] const std::vector<SearchNode>& nodes() const noexcept { return nodes_; }

    /// N equals children's N plus own simulations at every node.
    [[nodiscard]] bool visits_consistent() const;

private:
    std::vector<SearchNode> nodes_;
};

inline constexpr double kUnvisitedPriority = std::numeric_limits<double>::infinity();

/// (q + c u) exp(lambda compliance).
double shaped_value(double q, double u, double compliance, const AggregationConfig& cfg);

/// (Q + c U) exp(lambda C_total), U = sqrt(ln(parent_visits) / N). Unvisited nodes get
/// kUnvisitedPriority. With `shaped` false the exponential factor is 1.
double selection_score(const SearchNode& node, std::size_t parent_visits, const AggregationConfig& cfg,
                       bool shaped = true);

/// Descends by argmax selection score (ties to the lowest child index) until reaching a node
/// that is not expanded yet or has no children.
std::size_t select(const SearchTree& tree, const AggregationConfig& cfg, bool shaped = true);

/// Adds `credit` to W and one visit to the node and every ancestor; the node gains one own simulation.
void backpropagate(SearchTree& tree, std::size_t index, double credit);

struct GateDecision {
    std::vector<std::size_t> kept;    ///< candidate indices, ascending
    std::vector<std::size_t> pruned;
    bool fallback = false;            ///< every candidate fell below tau; argmax kept
};

/// Keeps candidates with C_total >= tau; when none qualify keeps the single argmax
/// (first on ties). With `gate_enabled` false everything is kept.
GateDecision gate_candidates(std::span<const double> compliances, double tau, bool gate_enabled = true);

/// Families whose score fell below tau, lowest first; the single weakest family when none did.
std::vector<std::string> dominant_failures(const ConstraintVector& scores, const FamilyMask& mask, double tau);

struct SearchResult {
    WorkflowProgram best;
    std::int64_t best_node_id = 0;
    double best_reward = 0.0;
    double best_compliance = 0.0;
    std::size_t simulations = 0;
    std::size_t proposed = 0;
    std::size_t pruned = 0;
    WeightVector weights;
    MotifLibrary library;

    [[nodiscard]] double pruning_rate() const noexcept {
        return proposed > 0 ? static_cast<double>(pruned) / static_cast<double>(proposed) : 0.0;
    }
};

/// Constraint-guided MCTS over complete workflow programs.
class GuidedSearch {
public:
    GuidedSearch(SearchSettings settings, OperatorRegistry registry, Proposer& proposer, Evaluator& evaluator,
                 MotifLibrary library, ProblemSet validation, std::string category, RunLog& log);

    /// Runs the full budget from `initial`. A zero budget returns `initial` without evaluating it.
    SearchResult run(const WorkflowProgram& initial);

    /// Installs `initial` as the root without simulating it.
    void reset(const WorkflowProgram& initial);

    /// Proposes and gates candidates for a leaf. Returns indices of attached children.
    std::vector<std::size_t> expand(std::size_t index, int round);
    /// Evaluates one node, folds measured magnitude into its scores and returns the clamped reward.
    double simulate(std::size_t index, int round);
    /// Credit for a simulated node: R * C_total, or raw R with backprop shaping off.
    [[nodiscard]] double credit_for(std::size_t index, double reward) const;

    [[nodiscard]] const SearchTree& tree() const noexcept { return tree_; }
    [[nodiscard]] const WeightVector& weights() const noexcept { return weights_; }
    [[nodiscard]] const MotifLibrary& library() const noexcept { return library_; }
    [[nodiscard]] std::size_t simulations() const noexcept { return simulations_; }

private:
    struct SimulationOutcome {
        Evaluation evaluation;
        double magnitude = 1.0;
        std::optional<std::string> failure;
    };

    SimulationOutcome run_evaluation(std::size_t index);
    double apply_simulation(std::size_t index, SimulationOutcome outcome, int round);
    void simulate_batch(const std::vector<std::size_t>& indices, int round);
    void end_round(int round);
    void refresh_compliance();
    double compliance_of(const ConstraintVector& scores) const;
    [[nodiscard]] SearchResult result() const;

    SearchSettings settings_;
    OperatorRegistry registry_;
    Proposer& proposer_;
    Evaluator& evaluator_;
    MotifLibrary library_;
    ProblemSet validation_;
    std::string category_;
    RunLog& log_;
    ComplianceScorer scorer_;

    SearchTree tree_;
    WeightVector weights_;
    ObservationBuffer buffer_;
    std::vector<ObservedHistogram> observed_;
    std::int64_t next_id_ = 1;
    std::size_t simulations_ = 0;
    std::size_t proposed_ = 0;
    std::size_t pruned_ = 0;
    std::int64_t optimizer_requests_ = 0;
    std::int64_t executor_requests_ = 0;
    int refinements_ = 0;
};

/// Convenience wrapper around GuidedSearch::run.
SearchResult run_optimization(const WorkflowProgram& initial, Proposer& proposer, Evaluator& evaluator,
                              const OperatorRegistry& registry, const MotifLibrary& library,
                              const ProblemSet& validation, const std::string& category,
                              const SearchSettings& settings, RunLog& log);

}  // namespace cgmcts
