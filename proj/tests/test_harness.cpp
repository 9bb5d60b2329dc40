#include <set>

#include <gtest/gtest.h>

#include "cgmcts/errors.hpp"
#include "cgmcts/suite.hpp"
#include "support.hpp"

using namespace cgmcts;
using namespace testing_support;

namespace {

const OperatorRegistry kReg = OperatorRegistry::baseline();

WorkflowProgram five_nodes() {
    return program({input(0), input(1), constant(2, 2.0), op(3, "add"), op(4, "neg")},
                   {{0, 3, 0}, {2, 3, 1}, {3, 4, 0}}, 4);
}

ProblemSet problem_set(std::vector<std::pair<double, double>> xs_expected) {
    ProblemSet set;
    for (auto [x, e] : xs_expected) set.problems.push_back(Problem{{{0, x}}, e, "c", {}});
    return set;
}

LogRecord token_record(Role role, std::int64_t in, std::int64_t out) {
    LogRecord r;
    r.event = role == Role::optimizer ? EventKind::expanded : EventKind::simulated;
    r.role = role;
    r.tokens_in = in;
    r.tokens_out = out;
    return r;
}

}  // namespace

TEST(Proposer, TrivialProgramOnlyInserts) {
    SyntheticProposer p(kReg);
    auto root = program({input(0), input(1)}, {}, 0);
    auto all = p.enumerate(root);
    ASSERT_FALSE(all.empty());
    for (const auto& c : all) {
        EXPECT_EQ(c.operator_count(), 1u);
        EXPECT_TRUE(validate_program(c, kReg).ok());
    }
    // 5 binary ops x (x,x),(x,y),(y,x) plus 3 unary ops over the output
    EXPECT_EQ(all.size(), 5u * 3u + 3u);
}

TEST(Proposer, CountDistinctValid) {
    SyntheticProposer p(kReg);
    auto prog = five_nodes();
    auto all = p.enumerate(prog);
    ASSERT_GT(all.size(), 8u);
    auto proposal = p.propose(prog, 8, 77);
    ASSERT_EQ(proposal.candidates.size(), 8u);
    std::set<std::string> keys;
    for (const auto& c : proposal.candidates) {
        EXPECT_TRUE(validate_program(c, kReg).ok());
        keys.insert(program_to_string(c));
        EXPECT_NE(program_to_string(c), program_to_string(relabel_operators(prog)));
    }
    EXPECT_EQ(keys.size(), 8u);
    EXPECT_EQ(proposal.usage.role, Role::optimizer);
    EXPECT_GT(proposal.usage.completion_tokens, 0);
}

TEST(Proposer, SubsetPreservesEnumerationOrder) {
    SyntheticProposer p(kReg);
    auto prog = five_nodes();
    auto all = p.enumerate(prog);
    auto proposal = p.propose(prog, 8, 5);
    std::size_t cursor = 0;
    for (const auto& c : proposal.candidates) {
        while (cursor < all.size() && !(all[cursor] == c)) ++cursor;
        ASSERT_LT(cursor, all.size());
    }
}

TEST(Proposer, Deterministic) {
    SyntheticProposer p(kReg);
    auto a = p.propose(five_nodes(), 8, 123);
    auto b = p.propose(five_nodes(), 8, 123);
    ASSERT_EQ(a.candidates.size(), b.candidates.size());
    for (std::size_t i = 0; i < a.candidates.size(); ++i) EXPECT_EQ(a.candidates[i], b.candidates[i]);
}

TEST(Proposer, RespectsOperatorCap) {
    SyntheticProposer p(kReg, ProposerOptions{2});
    auto prog = five_nodes();
    for (const auto& c : p.enumerate(prog)) EXPECT_LE(c.operator_count(), 2u);
}

TEST(Proposer, EditKinds) {
    SyntheticProposer p(kReg);
    auto prog = five_nodes();
    bool replaced = false, deleted = false, rewired = false;
    for (const auto& c : p.enumerate(prog)) {
        auto s = derive_state(c, kReg);
        if (c.operator_count() == 2 && !s.operator_histogram.contains("add")) replaced = true;
        if (c.operator_count() == 1 && s.operator_histogram.contains("add")) deleted = true;
        if (c.operator_count() == 2 && s.operator_histogram.count("add") && s.operator_histogram.count("neg") &&
            c.edges != relabel_operators(prog).edges)
            rewired = true;
    }
    EXPECT_TRUE(replaced);
    EXPECT_TRUE(deleted);
    EXPECT_TRUE(rewired);
}

TEST(Evaluator, Rewards) {
    SyntheticEvaluator ev(kReg);
    auto doubling = program({input(0), constant(1, 2.0), op(2, "mul")}, {{0, 2, 0}, {1, 2, 1}}, 2);
    auto set = problem_set({{1, 2}, {2, 4}, {3, 6}, {4, 8}});
    auto e = ev.evaluate(doubling, set);
    EXPECT_EQ(e.reward, 1.0);
    EXPECT_EQ(e.traces.size(), 4u);
    EXPECT_EQ(e.usage.role, Role::executor);

    // constant 2 against targets (2, 3, 2, 5): half of them match
    auto constant_two = program({input(0), constant(1, 2.0)}, {}, 1);
    auto mixed = problem_set({{1, 2}, {2, 3}, {3, 2}, {4, 5}});
    EXPECT_DOUBLE_EQ(ev.evaluate(constant_two, mixed).reward, 0.5);
    EXPECT_THROW(ev.evaluate(constant_two, ProblemSet{}), InputError);
}

TEST(Evaluator, DomainViolationIsIncorrect) {
    SyntheticEvaluator ev(kReg);
    auto inv = program({input(0), constant(1, 1.0), op(2, "div")}, {{1, 2, 0}, {0, 2, 1}}, 2);
    auto set = problem_set({{0, 0}, {2, 0.5}});
    auto e = ev.evaluate(inv, set);
    EXPECT_DOUBLE_EQ(e.reward, 0.5);
    EXPECT_FALSE(e.traces[0].success);
}

TEST(Split, OneToFour) {
    std::vector<Problem> ps(10);
    for (auto& p : ps) p.category = "c";
    auto s = split_problems(ps);
    EXPECT_EQ(s.validation.size(), 2u);
    EXPECT_EQ(s.test.size(), 8u);
}

TEST(Problems, JsonRoundTrip) {
    std::vector<Problem> ps{{{{0, 1.5}, {1, 2.0}}, 3.5, "a", {1.5, 2.0}}, {{{0, 1.0}}, 1.0, "a", {}}};
    for (int i = 0; i < 3; ++i) ps.push_back(ps[0]);
    auto doc = problems_to_json(ps);
    auto back = problems_from_json(doc);
    EXPECT_EQ(back.validation.size() + back.test.size(), 5u);
    EXPECT_EQ(back.validation.problems[0].inputs.at(1), 2.0);
    EXPECT_THROW(problems_from_json(nlohmann::json::parse(R"({"problems":[{"expected":1}]})")), ParseError);
}

TEST(Suite, DeterministicAndSelfConsistent) {
    auto a = make_synthetic_suite(42, 20, 2);
    auto b = make_synthetic_suite(42, 20, 2);
    ASSERT_EQ(a.targets.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(a.targets[i].second, b.targets[i].second);
    EXPECT_EQ(problems_to_json(a.problems.test.problems), problems_to_json(b.problems.test.problems));
    SyntheticEvaluator ev(a.registry);
    for (const auto& [cat, target] : a.targets) {
        EXPECT_EQ(ev.evaluate(target, a.problems.validation.for_category(cat)).reward, 1.0);
        EXPECT_EQ(ev.evaluate(target, a.problems.test.for_category(cat)).reward, 1.0);
        EXPECT_EQ(score_units(target, a.registry) == 0.5 || score_units(target, a.registry) == 1.0, true);
    }
    EXPECT_EQ(a.problems.validation.size(), 4u);
    EXPECT_THROW(make_synthetic_suite(1, 4, 1), InputError);
}

TEST(Accounting, TokensPerProblem) {
    RunLog empty;
    EXPECT_EQ(tokens_per_problem(empty, 3), 0.0);
    RunLog log;
    log.append(token_record(Role::optimizer, 100, 50));
    log.append(token_record(Role::executor, 200, 150));
    EXPECT_DOUBLE_EQ(tokens_per_problem(log, 5), 100.0);
    RunLog io;
    io.append(token_record(Role::executor, 70, 30));
    EXPECT_DOUBLE_EQ(tokens_per_problem(io, 4), 25.0);
    EXPECT_THROW(tokens_per_problem(log, 0), ContractViolation);
}

TEST(Accounting, Cost) {
    RunLog log;
    log.append(token_record(Role::executor, 1000, 500));
    PriceMap prices{{Role::executor, {1e-6, 2e-6}}, {Role::optimizer, {0, 0}}};
    EXPECT_NEAR(cost(log, prices, 1), 0.002, 1e-15);
    PriceMap zero{{Role::executor, {0, 0}}};
    EXPECT_EQ(cost(log, zero, 1), 0.0);
    PriceMap doubled{{Role::executor, {2e-6, 4e-6}}};
    EXPECT_NEAR(cost(log, doubled, 1), 2 * cost(log, prices, 1), 1e-15);
    PriceMap missing{{Role::optimizer, {1, 1}}};
    EXPECT_THROW(cost(log, missing, 1), ConfigError);
}
