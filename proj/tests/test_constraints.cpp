#include <cmath>

#include <gtest/gtest.h>

#include "cgmcts/errors.hpp"
#include "cgmcts/search.hpp"
#include "support.hpp"

using namespace cgmcts;
using namespace testing_support;

namespace {

WorkflowState depth_state(std::size_t d) {
    WorkflowState s;
    s.depth = d;
    return s;
}

WorkflowState hist_state(std::map<std::string, std::size_t> h) {
    WorkflowState s;
    s.operator_histogram = std::move(h);
    return s;
}

ConstraintVector vec(std::initializer_list<double> v) {
    ConstraintVector c;
    int i = 0;
    for (double x : v) c.values(i++) = x;
    return c;
}

const UnitSignature kLength = UnitSignature::base("length");
const UnitSignature kTime = UnitSignature::base("time");

}  // namespace

TEST(Depth, Examples) {
    DepthDiversityConfig cfg;
    EXPECT_DOUBLE_EQ(score_depth(depth_state(10), cfg), 1.0);
    EXPECT_NEAR(score_depth(depth_state(20), cfg), 0.5, 1e-12);
    EXPECT_EQ(score_depth(depth_state(30), cfg), 0.0);
}

TEST(Diversity, Examples) {
    std::map<std::string, std::size_t> uniform;
    for (const auto& n : OperatorRegistry::baseline().names()) uniform[n] = 3;
    EXPECT_NEAR(score_diversity(hist_state(uniform), 8), 1.0, 1e-12);
    EXPECT_EQ(score_diversity(hist_state({{"add", 5}}), 8), 0.0);
    EXPECT_NEAR(score_diversity(hist_state({{"add", 2}, {"mul", 2}}), 8), std::log(2.0) / std::log(8.0), 1e-12);
    EXPECT_EQ(score_diversity(hist_state({}), 8), 0.0);
    EXPECT_THROW(score_diversity(hist_state({}), 1), ContractViolation);
}

TEST(UnitsScore, Examples) {
    const auto reg = OperatorRegistry::baseline();
    auto untagged = program({input(0), input(1), op(2, "add")}, {{0, 2, 0}, {1, 2, 1}}, 2);
    EXPECT_EQ(score_units(untagged, reg), 0.5);
    auto solo = program({input(0, kLength), input(1, kLength), op(2, "mul")}, {{0, 2, 0}, {1, 2, 1}}, 2);
    EXPECT_EQ(score_units(solo, reg), 1.0);
}

TEST(UnitsScore, HalfWhenOneOfTwoFails) {
    const auto reg = OperatorRegistry::baseline();
    // add(length, length) and add(length, time) combined by a unitless op so only the adds are checked
    auto p = program({input(0, kLength), input(1, kLength), input(2, kTime), op(3, "add"), op(4, "add"),
                      op(5, "pow")},
                     {{0, 3, 0}, {1, 3, 1}, {0, 4, 0}, {2, 4, 1}, {3, 5, 0}, {4, 5, 1}}, 5);
    EXPECT_DOUBLE_EQ(score_units(p, reg), 0.5);
}

TEST(TypesScore, Examples) {
    const auto reg = OperatorRegistry::baseline();
    auto bad = program({constant(0, -3), op(1, "sqrt")}, {{0, 1, 0}}, 1);
    EXPECT_EQ(score_types(bad, reg), 0.0);
    // four ops, the log of a provably negative constant fails
    auto four = program({input(0), constant(1, -2), op(2, "add"), op(3, "log"), op(4, "mul"), op(5, "neg")},
                        {{0, 2, 0}, {0, 2, 1}, {1, 3, 0}, {2, 4, 0}, {3, 4, 1}, {4, 5, 0}}, 5);
    EXPECT_DOUBLE_EQ(score_types(four, reg), 0.75);
    EXPECT_EQ(score_types(program({input(0)}, {}, 0), reg), 0.5);
}

TEST(Magnitude, Examples) {
    MagnitudeConfig cfg;
    const double theta = 3.0 * 100.0;
    EXPECT_EQ(score_magnitude(theta, 3.0, cfg), 1.0);
    EXPECT_NEAR(score_magnitude(2 * theta, 3.0, cfg), 0.5, 1e-12);
    EXPECT_EQ(score_magnitude(4 * theta, 3.0, cfg), 0.0);
    EXPECT_EQ(score_magnitude(5.0, 0.0, cfg), 0.5);
    ExecutionTrace t;
    t.inputs = {-2.0, 1.0};
    t.intermediates = {-400.0, 3.0};
    EXPECT_NEAR(score_magnitude(t, cfg), 1.0 - 0.5 * 200.0 / 200.0, 1e-12);
}

TEST(Aggregate, Examples) {
    AggregationConfig cfg;
    WeightVector uniform;
    EXPECT_NEAR(aggregate(vec({1, 1, 1, 1, 1, 1}), uniform, cfg), 1.01, 1e-12);
    WeightVector skew;
    skew.values << 0.5, 0.1, 0.1, 0.1, 0.1, 0.1;
    EXPECT_NEAR(aggregate(vec({1, 1, 1, 1, 1, 1}), skew, cfg), 1.01, 1e-12);
    EXPECT_NEAR(aggregate(vec({0, 0, 0, 0, 0, 0}), uniform, cfg), 0.01, 1e-12);
    const double expected = oracle_aggregate({1, 1, 1, 1, 0, 1}, std::vector<double>(6, 1.0 / 6), 0.01);
    EXPECT_NEAR(aggregate(vec({1, 1, 1, 1, 0, 1}), uniform, cfg), expected, 1e-12);
    EXPECT_NEAR(expected, 0.468024, 1e-6);
}

TEST(Aggregate, MaskDropsFamilies) {
    AggregationConfig cfg;
    WeightVector uniform;
    auto only = FamilyMask::only(Family::pattern);
    EXPECT_NEAR(aggregate(vec({0, 0, 0.7, 0, 0, 0}), uniform, cfg, only), 0.71, 1e-12);
    FamilyMask none = only;
    none[Family::pattern] = false;
    EXPECT_THROW(aggregate(vec({1, 1, 1, 1, 1, 1}), uniform, cfg, none), ContractViolation);
    EXPECT_THROW(aggregate(vec({1, 1, 1.5, 1, 1, 1}), uniform, cfg), ContractViolation);
}

TEST(Threshold, Examples) {
    ThresholdSchedule s;
    EXPECT_NEAR(threshold(0, s), 0.6, 1e-12);
    EXPECT_NEAR(threshold(6, s), 0.3, 1e-12);
    EXPECT_NEAR(threshold(100, s), 0.3, 1e-12);
    EXPECT_NEAR(threshold(2, s), 0.5, 1e-12);
}

TEST(Selection, Examples) {
    AggregationConfig cfg;
    EXPECT_NEAR(shaped_value(0.5, 0.2, 1.0, cfg), (0.5 + 1.414 * 0.2) * std::exp(0.5), 1e-12);
    EXPECT_NEAR(shaped_value(0.5, 0.2, 1.0, cfg), 1.2907, 1e-4);
    EXPECT_NEAR(shaped_value(0.5, 0.2, 0.0, cfg), 0.5 + 1.414 * 0.2, 1e-12);

    SearchNode m;
    m.visits = 1;
    m.total_value = 0.5;
    m.compliance = 1.0;
    const double expect = (0.5 + 1.414 * std::sqrt(std::log(2.0))) * std::exp(0.5);
    EXPECT_NEAR(selection_score(m, 2, cfg), expect, 1e-12);
    EXPECT_NEAR(selection_score(m, 2, cfg, false), expect / std::exp(0.5), 1e-12);
    SearchNode fresh;
    EXPECT_EQ(selection_score(fresh, 3, cfg), kUnvisitedPriority);
}
