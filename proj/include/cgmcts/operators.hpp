#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cgmcts {

enum class OpCode { add, sub, mul, div, sqrt, log, pow, neg, diff, integ };

enum class DomainRule { none, input_nonneg, input_positive };

/// How an operator treats physical units of its operands.
enum class UnitBehavior {
    additive,        ///< operands must share a signature
    multiplicative,  ///< signatures multiply / divide
    transform,       ///< calculus op: shifts one dimension exponent by +-1
    unitless         ///< no unit semantics; output carries no signature
};

struct OperatorKind {
    std::string name;
    std::size_t arity = 0;
    DomainRule domain_rule = DomainRule::none;
    UnitBehavior unit_behavior = UnitBehavior::unitless;
    OpCode code = OpCode::add;
};

/// Result of applying an operator to concrete operands.
struct OpOutcome {
    std::optional<double> value;  ///< empty on a domain violation
    std::string violation;
};

/// Numeric semantics shared by the interpreter and static constant folding.
/// Division by zero and any non-finite result are domain violations.
OpOutcome apply_operator(OpCode code, std::span<const double> operands);

/// The operator set O. Names are unique; the order is the coordinate order of
/// every histogram vector derived from programs using this registry.
class OperatorRegistry {
public:
    OperatorRegistry() = default;
    explicit OperatorRegistry(std::vector<OperatorKind> kinds);

    /// add, sub, mul, div, sqrt, log, pow, neg.
    static OperatorRegistry baseline();
    /// baseline plus the calculus transforms diff and integ.
    static OperatorRegistry with_calculus();
    /// Subset of the calculus-extended set, in the order given.
    static OperatorRegistry from_names(std::span<const std::string> names);

    [[nodiscard]] const OperatorKind* find(std::string_view name) const noexcept;
    [[nodiscard]] const OperatorKind& at(std::string_view name) const;
    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view name) const noexcept;

    [[nodiscard]] std::size_t size() const noexcept { return kinds_.size(); }
    [[nodiscard]] const std::vector<OperatorKind>& kinds() const noexcept { return kinds_; }
    [[nodiscard]] std::vector<std::string> names() const;

private:
    std::vector<OperatorKind> kinds_;
};

/// Source node operators. They are not members of any registry.
inline constexpr std::string_view kInputOp = "input";
inline constexpr std::string_view kConstOp = "const";

inline bool is_source_op(std::string_view op) { return op == kInputOp || op == kConstOp; }

}  // namespace cgmcts
