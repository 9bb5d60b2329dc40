#include "cgmcts/search.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "cgmcts/errors.hpp"
#include "cgmcts/random.hpp"

namespace cgmcts {

std::string_view stage_name(Stage s) noexcept {
    switch (s) {
        case Stage::selection: return "selection";
        case Stage::expansion: return "expansion";
        case Stage::simulation: return "simulation";
        case Stage::backprop: return "backprop";
    }
    return "?";
}

bool StageMask::any() const { return std::any_of(enabled.begin(), enabled.end(), [](bool b) { return b; }); }

StageMask StageMask::only(Stage s) {
    StageMask m;
    m.enabled.fill(false);
    m[s] = true;
    return m;
}

// ---------------------------------------------------------------------------
// tree

std::size_t SearchTree::add_root(SearchNode node) {
    nodes_.clear();
    node.parent.reset();
    node.depth = 0;
    nodes_.push_back(std::move(node));
    return 0;
}

std::size_t SearchTree::add_child(std::size_t parent, SearchNode node) {
    if (parent >= nodes_.size()) throw ContractViolation("add_child: unknown parent");
    node.parent = parent;
    node.depth = nodes_[parent].depth + 1;
    nodes_.push_back(std::move(node));
    const std::size_t idx = nodes_.size() - 1;
    nodes_[parent].children.push_back(idx);
    return idx;
}

bool SearchTree::visits_consistent() const {
    for (const auto& n : nodes_) {
        std::size_t sum = n.own_simulations;
        for (auto c : n.children) sum += nodes_[c].visits;
        if (sum != n.visits) return false;
    }
    return true;
}

double shaped_value(double q, double u, double compliance, const AggregationConfig& cfg) {
    return (q + cfg.uct_c * u) * std::exp(cfg.lambda_shaping * compliance);
}

double selection_score(const SearchNode& node, std::size_t parent_visits, const AggregationConfig& cfg,
                       bool shaped) {
    if (node.visits == 0) return kUnvisitedPriority;
    const double n = static_cast<double>(node.visits);
    const double parent = static_cast<double>(std::max<std::size_t>(parent_visits, 1));
    const double u = std::sqrt(std::log(parent) / n);
    return shaped ? shaped_value(node.q_value(), u, node.compliance, cfg) : node.q_value() + cfg.uct_c * u;
}

std::size_t select(const SearchTree& tree, const AggregationConfig& cfg, bool shaped) {
    if (tree.empty()) throw ContractViolation("select on an empty tree");
    std::size_t current = 0;
    while (tree[current].expanded && !tree[current].children.empty()) {
        const auto& node = tree[current];
        std::size_t best = node.children.front();
        double best_score = -std::numeric_limits<double>::infinity();
        for (auto c : node.children) {
            double s = selection_score(tree[c], node.visits, cfg, shaped);
            if (s > best_score) {
                best_score = s;
                best = c;
            }
        }
        current = best;
    }
    return current;
}

void backpropagate(SearchTree& tree, std::size_t index, double credit) {
    tree[index].own_simulations += 1;
    std::optional<std::size_t> cur = index;
    while (cur) {
        auto& n = tree[*cur];
        n.visits += 1;
        n.total_value += credit;
        cur = n.parent;
    }
}

GateDecision gate_candidates(std::span<const double> compliances, double tau, bool gate_enabled) {
    GateDecision d;
    for (std::size_t i = 0; i < compliances.size(); ++i) {
        if (!gate_enabled || compliances[i] >= tau) {
            d.kept.push_back(i);
        } else {
            d.pruned.push_back(i);
        }
    }
    if (d.kept.empty() && !compliances.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < compliances.size(); ++i)
            if (compliances[i] > compliances[best]) best = i;
        d.kept.push_back(best);
        std::erase(d.pruned, best);
        d.fallback = true;
    }
    return d;
}

std::vector<std::string> dominant_failures(const ConstraintVector& scores, const FamilyMask& mask, double tau) {
    std::vector<Family> failing;
    for (auto f : kAllFamilies)
        if (mask[f] && scores[f] < tau) failing.push_back(f);
    if (failing.empty()) {
        std::optional<Family> weakest;
        for (auto f : kAllFamilies)
            if (mask[f] && (!weakest || scores[f] < scores[*weakest])) weakest = f;
        if (weakest) failing.push_back(*weakest);
    }
    std::stable_sort(failing.begin(), failing.end(), [&](Family a, Family b) { return scores[a] < scores[b]; });
    std::vector<std::string> out;
    for (auto f : failing) out.emplace_back(family_name(f));
    return out;
}

// ---------------------------------------------------------------------------
// search

GuidedSearch::GuidedSearch(SearchSettings settings, OperatorRegistry registry, Proposer& proposer,
                           Evaluator& evaluator, MotifLibrary library, ProblemSet validation, std::string category,
                           RunLog& log)
    : settings_(settings),
      registry_(registry),
      proposer_(proposer),
      evaluator_(evaluator),
      library_(std::move(library)),
      validation_(std::move(validation)),
      category_(std::move(category)),
      log_(log),
      scorer_(std::move(registry), settings.depth_diversity, settings.magnitude, settings.families),
      buffer_(settings.observation_window) {
    if (!settings_.families.any()) throw ConfigError("at least one constraint family must be enabled");
    if (settings_.budget.rounds < 0 || settings_.budget.simulations_per_round < 0)
        throw ConfigError("search budget must be non-negative");
    if (settings_.budget.max_candidates_per_expansion == 0)
        throw ConfigError("max_candidates_per_expansion must be positive");
}

double GuidedSearch::compliance_of(const ConstraintVector& scores) const {
    return aggregate(scores, weights_, settings_.aggregation, settings_.families);
}

void GuidedSearch::reset(const WorkflowProgram& initial) {
    require_valid(initial, registry_);
    tree_ = SearchTree{};
    weights_ = WeightVector::uniform();
    buffer_ = ObservationBuffer(settings_.observation_window);
    observed_.clear();
    next_id_ = 1;
    simulations_ = proposed_ = pruned_ = 0;
    optimizer_requests_ = executor_requests_ = 0;
    refinements_ = 0;

    SearchNode root;
    root.id = 0;
    root.program = canonicalize(initial);
    root.state = derive_state(root.program, registry_);
    root.scores = scorer_.static_scores(root.program, root.state, category_, library_);
    root.compliance = compliance_of(root.scores);
    tree_.add_root(std::move(root));
}

std::vector<std::size_t> GuidedSearch::expand(std::size_t index, int round) {
    auto& node = tree_[index];
    if (node.expanded) throw ContractViolation("node already expanded");
    const std::uint64_t seed = derive_seed(settings_.budget.seed, 0x10000 + static_cast<std::uint64_t>(node.id));
    Proposal proposal = proposer_.propose(node.program, settings_.budget.max_candidates_per_expansion, seed);
    if (proposal.candidates.size() > settings_.budget.max_candidates_per_expansion)
        proposal.candidates.resize(settings_.budget.max_candidates_per_expansion);

    const double tau = threshold(node.depth, settings_.schedule);
    struct Candidate {
        std::int64_t id;
        WorkflowProgram program;
        WorkflowState state;
        ConstraintVector scores;
        double compliance;
    };
    std::vector<Candidate> candidates;
    std::vector<double> compliances;
    for (auto& program : proposal.candidates) {
        program = canonicalize(std::move(program));
        require_valid(program, registry_);
        Candidate c{next_id_++, std::move(program), {}, {}, 0.0};
        c.state = derive_state(c.program, registry_);
        c.scores = scorer_.static_scores(c.program, c.state, category_, library_);
        c.compliance = compliance_of(c.scores);
        compliances.push_back(c.compliance);
        candidates.push_back(std::move(c));
    }
    const GateDecision gate = gate_candidates(compliances, tau, settings_.stages[Stage::expansion]);

    LogRecord rec;
    rec.round = round;
    rec.event = EventKind::expanded;
    rec.node_id = tree_[index].id;
    rec.c_total = tree_[index].compliance;
    rec.tau = tau;
    rec.tokens_in = proposal.usage.prompt_tokens;
    rec.tokens_out = proposal.usage.completion_tokens;
    rec.role = Role::optimizer;
    rec.request_id = proposal.usage.request_id.empty() ? "opt-" + std::to_string(++optimizer_requests_)
                                                        : proposal.usage.request_id;
    rec.depth = static_cast<std::int64_t>(tree_[index].depth);
    rec.proposed = static_cast<std::int64_t>(candidates.size());
    rec.kept = static_cast<std::int64_t>(gate.kept.size());
    rec.fallback = gate.fallback;
    log_.append(std::move(rec));

    for (auto i : gate.pruned) {
        LogRecord p;
        p.round = round;
        p.event = EventKind::pruned;
        p.node_id = candidates[i].id;
        p.parent_id = tree_[index].id;
        p.c_vector = candidates[i].scores;
        p.c_total = candidates[i].compliance;
        p.tau = tau;
        p.depth = static_cast<std::int64_t>(tree_[index].depth);
        p.reasons = dominant_failures(candidates[i].scores, settings_.families, tau);
        log_.append(std::move(p));
    }

    proposed_ += candidates.size();
    pruned_ += gate.pruned.size();
    tree_[index].expanded = true;
    if (candidates.empty()) tree_[index].terminal = true;

    std::vector<std::size_t> attached;
    for (auto i : gate.kept) {
        SearchNode child;
        child.id = candidates[i].id;
        child.program = std::move(candidates[i].program);
        child.state = std::move(candidates[i].state);
        child.scores = candidates[i].scores;
        child.compliance = candidates[i].compliance;
        attached.push_back(tree_.add_child(index, std::move(child)));
    }
    return attached;
}

GuidedSearch::SimulationOutcome GuidedSearch::run_evaluation(std::size_t index) {
    SimulationOutcome out;
    const auto& program = tree_[index].program;
    try {
        out.evaluation = evaluator_.evaluate(program, validation_);
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        out.evaluation = Evaluation{};
        out.evaluation.usage.role = Role::executor;
        out.failure = e.what();
        return out;
    }
    out.magnitude = scorer_.measured_magnitude(out.evaluation.traces);
    return out;
}

double GuidedSearch::apply_simulation(std::size_t index, SimulationOutcome outcome, int round) {
    auto& node = tree_[index];
    double reward = outcome.evaluation.reward;
    if (!std::isfinite(reward)) reward = 0.0;
    reward = std::clamp(reward, 0.0, 1.0);
    const bool failed = outcome.failure.has_value();

    if (settings_.families[Family::magnitude]) {
        if (settings_.stages[Stage::simulation] && !failed) {
            node.scores[Family::magnitude] = outcome.magnitude;
            node.magnitude_measured = true;
        }
    }
    node.compliance = compliance_of(node.scores);
    node.reward_sum += reward;
    ++simulations_;
    buffer_.push(node.scores, reward);
    Eigen::VectorXd hist = node.state.histogram_vector(registry_);
    if (hist.sum() > 0) observed_.emplace_back(category_, hist);

    LogRecord rec;
    rec.round = round;
    rec.event = EventKind::simulated;
    rec.node_id = node.id;
    if (node.parent) rec.parent_id = tree_[*node.parent].id;
    rec.c_vector = node.scores;
    rec.c_total = node.compliance;
    rec.reward = reward;
    rec.tokens_in = outcome.evaluation.usage.prompt_tokens;
    rec.tokens_out = outcome.evaluation.usage.completion_tokens;
    rec.role = Role::executor;
    ++executor_requests_;
    rec.request_id = outcome.evaluation.usage.request_id.empty() ? "exec-" + std::to_string(executor_requests_)
                                                                 : outcome.evaluation.usage.request_id;
    if (failed) rec.note = "evaluator failure: " + *outcome.failure;
    rec.depth = static_cast<std::int64_t>(node.depth);
    rec.simulation = static_cast<std::int64_t>(simulations_);
    const double credit = credit_for(index, reward);
    rec.credit = credit;
    log_.append(std::move(rec));

    backpropagate(tree_, index, credit);
    return reward;
}

double GuidedSearch::simulate(std::size_t index, int round) {
    if (validation_.empty()) throw ConfigError("empty validation batch");
    return apply_simulation(index, run_evaluation(index), round);
}

void GuidedSearch::simulate_batch(const std::vector<std::size_t>& indices, int round) {
    if (validation_.empty()) throw ConfigError("empty validation batch");
    if (!settings_.parallel_simulations || indices.size() < 2) {
        for (auto i : indices) simulate(i, round);
        return;
    }
    std::vector<std::future<SimulationOutcome>> futures;
    for (auto i : indices) futures.push_back(std::async(std::launch::async, [this, i] { return run_evaluation(i); }));
    std::vector<SimulationOutcome> outcomes;
    for (auto& f : futures) outcomes.push_back(f.get());
    for (std::size_t k = 0; k < indices.size(); ++k) apply_simulation(indices[k], std::move(outcomes[k]), round);
}

double GuidedSearch::credit_for(std::size_t index, double reward) const {
    return settings_.stages[Stage::backprop] ? reward * tree_[index].compliance : reward;
}

void GuidedSearch::refresh_compliance() {
    for (std::size_t i = 0; i < tree_.size(); ++i) {
        auto& n = tree_[i];
        if (settings_.families[Family::pattern]) n.scores[Family::pattern] = scorer_.pattern(n.state, category_, library_);
        n.compliance = compliance_of(n.scores);
    }
}

void GuidedSearch::end_round(int round) {
    bool changed = false;
    if (settings_.adaptive_weights && round >= settings_.adaptation.warmup_rounds && buffer_.size() >= 2) {
        const FamilyArray corr = buffer_.correlations();
        weights_ = update_weights(weights_, buffer_, settings_.adaptation, round);
        LogRecord rec;
        rec.round = round;
        rec.event = EventKind::weights_updated;
        rec.weights = weights_.values;
        rec.correlations = corr;
        log_.append(std::move(rec));
        changed = true;
    }
    const int period = library_.params().refinement_period;
    if (period > 0 && round % period == 0 && !library_.frozen()) {
        library_ = refine(library_, observed_, round, derive_seed(settings_.budget.seed, 0x20000 + round));
        observed_.clear();
        ++refinements_;
        LogRecord rec;
        rec.round = round;
        rec.event = EventKind::refined;
        rec.motif_count = static_cast<std::int64_t>(library_.count(category_));
        rec.category = category_;
        log_.append(std::move(rec));
        changed = true;
    }
    if (changed) refresh_compliance();
}

SearchResult GuidedSearch::run(const WorkflowProgram& initial) {
    reset(initial);
    const auto& budget = settings_.budget;
    if (budget.rounds == 0 || budget.simulations_per_round == 0) return result();
    if (validation_.empty()) throw ConfigError("empty validation batch");

    const bool shaped = settings_.stages[Stage::selection];
    simulate(0, 1);
    for (int round = 1; round <= budget.rounds; ++round) {
        for (int it = 0; it < budget.simulations_per_round; ++it) {
            const std::size_t idx = select(tree_, settings_.aggregation, shaped);
            LogRecord sel;
            sel.round = round;
            sel.event = EventKind::selected;
            sel.node_id = tree_[idx].id;
            sel.c_total = tree_[idx].compliance;
            sel.depth = static_cast<std::int64_t>(tree_[idx].depth);
            log_.append(std::move(sel));

            if (!tree_[idx].expanded) {
                auto children = expand(idx, round);
                if (!children.empty()) {
                    simulate_batch(children, round);
                    continue;
                }
            }
            simulate(idx, round);
        }
        end_round(round);
    }
    return result();
}

SearchResult GuidedSearch::result() const {
    SearchResult r;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < tree_.size(); ++i) {
        const auto& n = tree_[i];
        if (n.own_simulations == 0) continue;
        if (!best) {
            best = i;
            continue;
        }
        const auto& b = tree_[*best];
        if (n.mean_reward() > b.mean_reward() ||
            (n.mean_reward() == b.mean_reward() && n.compliance > b.compliance))
            best = i;
    }
    const auto& chosen = tree_[best.value_or(0)];
    r.best = chosen.program;
    r.best_node_id = chosen.id;
    r.best_reward = chosen.mean_reward();
    r.best_compliance = chosen.compliance;
    r.simulations = simulations_;
    r.proposed = proposed_;
    r.pruned = pruned_;
    r.weights = weights_;
    r.library = library_;
    return r;
}

SearchResult run_optimization(const WorkflowProgram& initial, Proposer& proposer, Evaluator& evaluator,
                              const OperatorRegistry& registry, const MotifLibrary& library,
                              const ProblemSet& validation, const std::string& category,
                              const SearchSettings& settings, RunLog& log) {
    GuidedSearch search(settings, registry, proposer, evaluator, library, validation, category, log);
    return search.run(initial);
}

}  // namespace cgmcts
