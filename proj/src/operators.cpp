#include "cgmcts/operators.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cgmcts/errors.hpp"

namespace cgmcts {

OpOutcome apply_operator(OpCode code, std::span<const double> x) {
    double r = 0.0;
    switch (code) {
        case OpCode::add: r = x[0] + x[1]; break;
        case OpCode::sub: r = x[0] - x[1]; break;
        case OpCode::mul: r = x[0] * x[1]; break;
        case OpCode::div:
            if (x[1] == 0.0) return {std::nullopt, "division by zero"};
            r = x[0] / x[1];
            break;
        case OpCode::sqrt:
            if (x[0] < 0.0) return {std::nullopt, "sqrt of negative value"};
            r = std::sqrt(x[0]);
            break;
        case OpCode::log:
            if (x[0] <= 0.0) return {std::nullopt, "log of non-positive value"};
            r = std::log(x[0]);
            break;
        case OpCode::pow: r = std::pow(x[0], x[1]); break;
        case OpCode::neg: r = -x[0]; break;
        // Calculus transforms annotate dimensions; over scalars they carry the value through.
        case OpCode::diff:
        case OpCode::integ: r = x[0]; break;
    }
    if (!std::isfinite(r)) return {std::nullopt, "non-finite result"};
    return {r, {}};
}

OperatorRegistry::OperatorRegistry(std::vector<OperatorKind> kinds) : kinds_(std::move(kinds)) {
    std::set<std::string> seen;
    for (const auto& k : kinds_) {
        if (k.name.empty() || is_source_op(k.name)) throw ContractViolation("invalid operator name '" + k.name + "'");
        if (!seen.insert(k.name).second) throw ContractViolation("duplicate operator '" + k.name + "'");
        if (k.unit_behavior == UnitBehavior::additive && k.arity < 2)
            throw ContractViolation("additive operator '" + k.name + "' needs arity >= 2");
    }
}

namespace {

const std::vector<OperatorKind>& calculus_kinds() {
    static const std::vector<OperatorKind> kinds{
        {"add", 2, DomainRule::none, UnitBehavior::additive, OpCode::add},
        {"sub", 2, DomainRule::none, UnitBehavior::additive, OpCode::sub},
        {"mul", 2, DomainRule::none, UnitBehavior::multiplicative, OpCode::mul},
        {"div", 2, DomainRule::none, UnitBehavior::multiplicative, OpCode::div},
        {"sqrt", 1, DomainRule::input_nonneg, UnitBehavior::unitless, OpCode::sqrt},
        {"log", 1, DomainRule::input_positive, UnitBehavior::unitless, OpCode::log},
        {"pow", 2, DomainRule::none, UnitBehavior::unitless, OpCode::pow},
        {"neg", 1, DomainRule::none, UnitBehavior::multiplicative, OpCode::neg},
        {"diff", 1, DomainRule::none, UnitBehavior::transform, OpCode::diff},
        {"integ", 1, DomainRule::none, UnitBehavior::transform, OpCode::integ},
    };
    return kinds;
}

}  // namespace

OperatorRegistry OperatorRegistry::baseline() {
    const auto& all = calculus_kinds();
    return OperatorRegistry(std::vector<OperatorKind>(all.begin(), all.begin() + 8));
}

OperatorRegistry OperatorRegistry::with_calculus() { return OperatorRegistry(calculus_kinds()); }

OperatorRegistry OperatorRegistry::from_names(std::span<const std::string> names) {
    std::vector<OperatorKind> kinds;
    for (const auto& name : names) {
        auto it = std::find_if(calculus_kinds().begin(), calculus_kinds().end(),
                               [&](const OperatorKind& k) { return k.name == name; });
        if (it == calculus_kinds().end()) throw ConfigError("unknown operator '" + name + "'");
        kinds.push_back(*it);
    }
    return OperatorRegistry(std::move(kinds));
}

const OperatorKind* OperatorRegistry::find(std::string_view name) const noexcept {
    for (const auto& k : kinds_)
        if (k.name == name) return &k;
    return nullptr;
}

const OperatorKind& OperatorRegistry::at(std::string_view name) const {
    if (const auto* k = find(name)) return *k;
    throw InputError("operator '" + std::string(name) + "' is not in the registry");
}

std::optional<std::size_t> OperatorRegistry::index_of(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < kinds_.size(); ++i)
        if (kinds_[i].name == name) return i;
    return std::nullopt;
}

std::vector<std::string> OperatorRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(kinds_.size());
    for (const auto& k : kinds_) out.push_back(k.name);
    return out;
}

}  // namespace cgmcts
