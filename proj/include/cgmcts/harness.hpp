#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cgmcts/interpreter.hpp"
#include "cgmcts/run_log.hpp"

namespace cgmcts {

enum class Split { validation, test };

struct Problem {
    InputBinding inputs;
    double expected = 0.0;
    std::string category;
    std::vector<double> constants;  ///< problem constants V_in; empty means "use the source values"
};

struct ProblemSet {
    std::vector<Problem> problems;
    Split split = Split::validation;

    [[nodiscard]] bool empty() const noexcept { return problems.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return problems.size(); }
    [[nodiscard]] ProblemSet for_category(const std::string& category) const;
    [[nodiscard]] std::vector<std::string> categories() const;  ///< first-seen order
};

/// Validation/test split of a problem collection; `validation_share : test_share` per category.
struct SplitProblems {
    ProblemSet validation;
    ProblemSet test;
};
SplitProblems split_problems(const std::vector<Problem>& problems, int validation_share = 1, int test_share = 4);

// {problems:[{inputs:{"id":value}, expected, category, constants}], split_ratio:[1,4]}
nlohmann::json problems_to_json(const std::vector<Problem>& problems, int validation_share = 1, int test_share = 4);
SplitProblems problems_from_json(const nlohmann::json& doc);

struct TokenRecord {
    Role role = Role::executor;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::string request_id;
};

struct Proposal {
    std::vector<WorkflowProgram> candidates;
    TokenRecord usage;
};

struct Evaluation {
    double reward = 0.0;
    std::vector<ExecutionTrace> traces;
    TokenRecord usage;
};

/// Edit proposer role (the optimizer).
class Proposer {
public:
    virtual ~Proposer() = default;
    /// Up to `count` distinct valid programs derived from `program`.
    virtual Proposal propose(const WorkflowProgram& program, std::size_t count, std::uint64_t seed) = 0;
};

/// Evaluator role (the executor). Implementations must be safe to call concurrently.
class Evaluator {
public:
    virtual ~Evaluator() = default;
    /// Throws InputError on an empty problem set.
    virtual Evaluation evaluate(const WorkflowProgram& program, const ProblemSet& problems) = 0;
};

struct ProposerOptions {
    std::size_t max_operators = 6;  ///< insertions stop at this many operator nodes
};

/// Deterministic enumerative proposer.
///
/// Edits are enumerated in a fixed order: operator insertion (at the output,
/// then on each edge, for each registry op and each placement of the source
/// among the other slots' root operands), operator replacement with a same-arity op,
/// deletion of unary nodes, and rewiring of one input slot. Invalid or duplicate
/// results are skipped. When more than `count` remain, a seeded subset is taken,
/// preserving enumeration order.
class SyntheticProposer final : public Proposer {
public:
    SyntheticProposer(OperatorRegistry registry, ProposerOptions options = {});

    /// Every distinct valid single-edit neighbour, in enumeration order.
    [[nodiscard]] std::vector<WorkflowProgram> enumerate(const WorkflowProgram& program) const;

    Proposal propose(const WorkflowProgram& program, std::size_t count, std::uint64_t seed) override;

    [[nodiscard]] const OperatorRegistry& registry() const noexcept { return registry_; }

private:
    OperatorRegistry registry_;
    ProposerOptions options_;
};

struct Tolerance {
    double absolute = 1e-9;
    double relative = 0.0;  ///< used for configs enabling irrational operators
};

/// Runs the interpreter on each problem; reward is the exact-match fraction.
class SyntheticEvaluator final : public Evaluator {
public:
    SyntheticEvaluator(OperatorRegistry registry, Tolerance tolerance = {});
    Evaluation evaluate(const WorkflowProgram& program, const ProblemSet& problems) override;

private:
    OperatorRegistry registry_;
    Tolerance tolerance_;
};

/// Synthetic token proxies: deterministic functions of payload size.
std::int64_t program_token_size(const WorkflowProgram& program);

/// Total prompt+completion tokens in the log divided by n_problems.
double tokens_per_problem(const RunLog& log, std::size_t n_problems);
double tokens_per_problem(const std::vector<TokenRecord>& records, std::size_t n_problems);

/// Sum of prompt*input_price + completion*output_price, averaged per problem.
/// Throws ConfigError when a role appearing in the log has no price.
double cost(const RunLog& log, const PriceMap& prices, std::size_t n_problems);
double cost(const std::vector<TokenRecord>& records, const PriceMap& prices, std::size_t n_problems);

}  // namespace cgmcts
