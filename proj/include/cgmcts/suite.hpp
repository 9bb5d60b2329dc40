#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cgmcts/harness.hpp"

namespace cgmcts {

struct SourceSpec {
    std::string name;
    std::optional<UnitSignature> unit;
    std::optional<double> value;  ///< set for const sources
};

struct SuiteOptions {
    std::vector<std::string> registry{"add", "sub", "mul", "div", "sqrt", "log", "pow", "neg"};
    std::vector<SourceSpec> sources{
        {"x", UnitSignature::base("length"), std::nullopt},
        {"y", UnitSignature::base("length"), std::nullopt},
        {"t", UnitSignature::base("time"), std::nullopt},
        {"two", UnitSignature::dimensionless(), 2.0},
    };
    std::size_t min_target_operators = 2;
    std::size_t max_target_operators = 3;
    std::size_t max_program_operators = 5;  ///< proposer growth cap
    int input_low = 1;
    int input_high = 9;
    int validation_share = 1;
    int test_share = 4;
    int max_retries = 500;
};

struct SyntheticSuite {
    OperatorRegistry registry;
    WorkflowProgram initial;  ///< output wired straight to the first source
    std::vector<std::pair<std::string, WorkflowProgram>> targets;  ///< hidden target per category
    SplitProblems problems;

    [[nodiscard]] const WorkflowProgram& target(const std::string& category) const;
};

/// Builds a seeded suite: one hidden target per category, reached from the initial program by
/// random proposer edits, accepted only when unit/type consistent, free of domain violations
/// on every sampled input, not constant across problems and not a copy of one input. Problems are dealt round-robin to
/// categories (n_problems in total) and split validation:test per category.
/// Throws InputError when n_problems < 5 and Error when no target is found within max_retries.
SyntheticSuite make_synthetic_suite(std::uint64_t seed, std::size_t n_problems, std::size_t category_count,
                                    const SuiteOptions& options = {});

std::string category_name(std::size_t index);

}  // namespace cgmcts
