#include <sstream>

#include <gtest/gtest.h>

#include "cgmcts/errors.hpp"
#include "cgmcts/search.hpp"
#include "cgmcts/suite.hpp"
#include "support.hpp"

using namespace cgmcts;
using namespace testing_support;

namespace {

SearchNode stats(std::size_t visits, double value, double compliance) {
    SearchNode n;
    n.visits = visits;
    n.total_value = value;
    n.compliance = compliance;
    return n;
}

struct Fixture {
    SyntheticSuite suite;
    MotifLibrary lib;
    SearchSettings settings;

    explicit Fixture(std::uint64_t seed = 3) {
        SuiteOptions o;
        o.registry = {"add", "mul", "div"};
        o.sources.resize(2);
        o.max_program_operators = 2;
        o.min_target_operators = 1;
        o.max_target_operators = 2;
        suite = make_synthetic_suite(seed, 20, 1, o);
        lib = init_templates(suite.registry.names(), {"cat0"}, 4, seed);
        settings.budget.rounds = 6;
        settings.budget.seed = seed;
    }
};

class ThrowingEvaluator final : public Evaluator {
public:
    Evaluation evaluate(const WorkflowProgram&, const ProblemSet&) override { throw AdapterError("boom"); }
};

std::string dump(const RunLog& log) {
    std::ostringstream os;
    log.write_ndjson(os);
    return os.str();
}

}  // namespace

TEST(Select, RootOnly) {
    SearchTree t;
    t.add_root(SearchNode{});
    EXPECT_EQ(select(t, AggregationConfig{}), 0u);
}

TEST(Select, FollowsShapedPath) {
    SearchTree t;
    auto root = stats(10, 5, 0.5);
    root.expanded = true;
    t.add_root(root);
    auto a = t.add_child(0, stats(5, 2.5, 0.3));
    auto b = t.add_child(0, stats(5, 2.5, 0.9));
    t[a].expanded = t[b].expanded = true;
    t.add_child(a, stats(5, 2.5, 1.0));
    auto b1 = t.add_child(b, stats(2, 1.0, 0.2));
    auto b2 = t.add_child(b, stats(2, 1.0, 0.8));
    t[b1].expanded = t[b2].expanded = true;
    EXPECT_EQ(select(t, AggregationConfig{}), b2);
    // without shaping, ties go to the lowest child index
    EXPECT_EQ(select(t, AggregationConfig{}, false), t[a].children.front());
}

TEST(Select, UnvisitedFirst) {
    SearchTree t;
    auto root = stats(10, 9, 1);
    root.expanded = true;
    t.add_root(root);
    t.add_child(0, stats(9, 9, 1.0));
    auto fresh = t.add_child(0, stats(0, 0, 0.0));
    EXPECT_EQ(select(t, AggregationConfig{}), fresh);
}

TEST(Gate, Examples) {
    ThresholdSchedule s;
    std::vector<double> c{0.7, 0.5, 0.2};
    auto d0 = gate_candidates(c, threshold(0, s));
    EXPECT_EQ(d0.kept, std::vector<std::size_t>{0});
    EXPECT_EQ(d0.pruned.size(), 2u);
    EXPECT_FALSE(d0.fallback);
    auto d6 = gate_candidates(c, threshold(6, s));
    EXPECT_EQ(d6.kept, (std::vector<std::size_t>{0, 1}));
    std::vector<double> low{0.1, 0.4, 0.4, 0.2};
    auto f = gate_candidates(low, 0.6);
    EXPECT_EQ(f.kept, std::vector<std::size_t>{1});
    EXPECT_EQ(f.pruned.size(), 3u);
    EXPECT_TRUE(f.fallback);
    auto off = gate_candidates(low, 0.6, false);
    EXPECT_EQ(off.kept.size(), 4u);
    EXPECT_TRUE(gate_candidates(std::vector<double>{}, 0.6).kept.empty());
}

TEST(Backprop, Examples) {
    SearchTree t;
    t.add_root(SearchNode{});
    auto c = t.add_child(0, SearchNode{});
    auto g = t.add_child(c, SearchNode{});
    backpropagate(t, g, 1.0 * 0.8);
    EXPECT_DOUBLE_EQ(t[0].total_value, 0.8);
    backpropagate(t, g, 0.5 * 0.8);
    EXPECT_DOUBLE_EQ(t[c].total_value, 1.2);
    backpropagate(t, c, 0.0);
    EXPECT_EQ(t[0].visits, 3u);
    EXPECT_DOUBLE_EQ(t[0].total_value, 1.2);
    EXPECT_TRUE(t.visits_consistent());
}

TEST(DominantFailures, Ordering) {
    ConstraintVector c;
    c.values << 0.2, 1, 0.1, 1, 1, 0.7;
    EXPECT_EQ(dominant_failures(c, FamilyMask{}, 0.6), (std::vector<std::string>{"pattern", "units"}));
    EXPECT_EQ(dominant_failures(c, FamilyMask{}, 0.05), std::vector<std::string>{"pattern"});
}

TEST(GuidedSearch, ZeroBudgetReturnsInitial) {
    Fixture f;
    f.settings.budget.rounds = 0;
    SyntheticProposer p(f.suite.registry, {2});
    SyntheticEvaluator e(f.suite.registry);
    RunLog log;
    auto r = run_optimization(f.suite.initial, p, e, f.suite.registry, f.lib, f.suite.problems.validation, "cat0",
                              f.settings, log);
    EXPECT_EQ(r.best, canonicalize(f.suite.initial));
    EXPECT_EQ(r.simulations, 0u);
    EXPECT_EQ(log.size(), 0u);
}

TEST(GuidedSearch, DeterministicAndConsistent) {
    Fixture f;
    SyntheticProposer p(f.suite.registry, {2});
    SyntheticEvaluator e(f.suite.registry);
    RunLog a, b;
    GuidedSearch s1(f.settings, f.suite.registry, p, e, f.lib, f.suite.problems.validation, "cat0", a);
    auto r1 = s1.run(f.suite.initial);
    EXPECT_TRUE(s1.tree().visits_consistent());
    auto r2 = run_optimization(f.suite.initial, p, e, f.suite.registry, f.lib, f.suite.problems.validation, "cat0",
                               f.settings, b);
    EXPECT_EQ(dump(a), dump(b));
    EXPECT_EQ(r1.best, r2.best);
    EXPECT_GT(r1.simulations, 0u);
    for (const auto& n : s1.tree().nodes()) {
        ASSERT_GE(n.q_value(), 0.0);
        ASSERT_LE(n.q_value(), 1.0 + f.settings.aggregation.epsilon);
    }
}

TEST(GuidedSearch, ParallelMatchesSequential) {
    Fixture f;
    SyntheticProposer p(f.suite.registry, {2});
    SyntheticEvaluator e(f.suite.registry);
    RunLog a, b;
    run_optimization(f.suite.initial, p, e, f.suite.registry, f.lib, f.suite.problems.validation, "cat0",
                     f.settings, a);
    auto par = f.settings;
    par.parallel_simulations = true;
    run_optimization(f.suite.initial, p, e, f.suite.registry, f.lib, f.suite.problems.validation, "cat0", par, b);
    EXPECT_EQ(dump(a), dump(b));
}

TEST(GuidedSearch, PruningSoundness) {
    Fixture f;
    SyntheticProposer p(f.suite.registry, {2});
    SyntheticEvaluator e(f.suite.registry);
    RunLog log;
    run_optimization(f.suite.initial, p, e, f.suite.registry, f.lib, f.suite.problems.validation, "cat0",
                     f.settings, log);
    for (const auto& r : log.records()) {
        if (r.event == EventKind::pruned) {
            ASSERT_LT(*r.c_total, *r.tau);
            ASSERT_FALSE(r.reasons.empty());
        }
        if (r.event == EventKind::expanded && *r.kept > 0 && *r.fallback) ASSERT_EQ(*r.kept, 1);
    }
}

TEST(GuidedSearch, EvaluatorFailureScoresZero) {
    Fixture f;
    f.settings.budget.rounds = 1;
    f.settings.budget.simulations_per_round = 1;
    SyntheticProposer p(f.suite.registry, {2});
    ThrowingEvaluator e;
    RunLog log;
    auto r = run_optimization(f.suite.initial, p, e, f.suite.registry, f.lib, f.suite.problems.validation, "cat0",
                              f.settings, log);
    EXPECT_EQ(r.best_reward, 0.0);
    bool noted = false;
    for (const auto& rec : log.records())
        if (rec.event == EventKind::simulated && rec.note) noted = true;
    EXPECT_TRUE(noted);
}

TEST(GuidedSearch, EmptyValidationIsConfigError) {
    Fixture f;
    SyntheticProposer p(f.suite.registry, {2});
    SyntheticEvaluator e(f.suite.registry);
    RunLog log;
    GuidedSearch s(f.settings, f.suite.registry, p, e, f.lib, ProblemSet{}, "cat0", log);
    EXPECT_THROW(s.run(f.suite.initial), ConfigError);
}

TEST(GuidedSearch, MagnitudeOverflowLowersCompliance) {
    const auto reg = OperatorRegistry::baseline();
    // x * x * x * x with x = 9 reaches 6561 > 9 * 10^2
    auto blow = program({input(0), op(1, "mul"), op(2, "mul")}, {{0, 1, 0}, {0, 1, 1}, {1, 2, 0}, {1, 2, 1}}, 2);
    ProblemSet set;
    set.problems.push_back(Problem{{{0, 9.0}}, 0.0, "c", {}});
    SyntheticProposer p(reg);
    SyntheticEvaluator e(reg);
    RunLog log;
    GuidedSearch s(SearchSettings{}, reg, p, e, init_templates(reg.names(), {"c"}, 12, 1), set, "c", log);
    s.reset(blow);
    const double before = s.tree()[0].compliance;
    s.simulate(0, 1);
    EXPECT_LT(s.tree()[0].scores[Family::magnitude], 1.0);
    EXPECT_LT(s.tree()[0].compliance, before);
}

TEST(GuidedSearch, StageSwitches) {
    Fixture f;
    SyntheticProposer p(f.suite.registry, {2});
    SyntheticEvaluator e(f.suite.registry);
    auto settings = f.settings;
    settings.stages = StageMask::only(Stage::selection);
    RunLog log;
    auto r = run_optimization(f.suite.initial, p, e, f.suite.registry, f.lib, f.suite.problems.validation, "cat0",
                              settings, log);
    EXPECT_EQ(r.pruned, 0u);
    for (const auto& rec : log.records()) {
        if (rec.event != EventKind::simulated) continue;
        EXPECT_EQ((*rec.c_vector)[Family::magnitude], 1.0);
        EXPECT_EQ(*rec.credit, *rec.reward);
    }
}

TEST(GuidedSearch, AdaptiveWeightsAndRefinementLogged) {
    Fixture f;
    f.settings.budget.rounds = 6;
    SyntheticProposer p(f.suite.registry, {2});
    SyntheticEvaluator e(f.suite.registry);
    RunLog log;
    auto r = run_optimization(f.suite.initial, p, e, f.suite.registry, f.lib, f.suite.problems.validation, "cat0",
                              f.settings, log);
    std::vector<int> weight_rounds, refine_rounds;
    for (const auto& rec : log.records()) {
        if (rec.event == EventKind::weights_updated) weight_rounds.push_back(rec.round);
        if (rec.event == EventKind::refined) refine_rounds.push_back(rec.round);
    }
    EXPECT_EQ(weight_rounds, (std::vector<int>{5, 6}));
    EXPECT_EQ(refine_rounds, (std::vector<int>{3, 6}));
    EXPECT_TRUE(r.weights.on_simplex());
}
