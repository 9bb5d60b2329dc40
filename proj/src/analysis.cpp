#include "cgmcts/analysis.hpp"

#include <vector>

namespace cgmcts {

namespace {

std::uint8_t sign_of(double v) { return v < 0.0 ? kNegative : (v == 0.0 ? kZero : kPositive); }

std::uint8_t flip(std::uint8_t s) {
    std::uint8_t out = s & kZero;
    if (s & kNegative) out |= kPositive;
    if (s & kPositive) out |= kNegative;
    return out;
}

std::uint8_t sum_signs(std::uint8_t a, std::uint8_t b) {
    static constexpr std::uint8_t table[3][3] = {
        // N, Z, P
        {kNegative, kNegative, kAnySign},  // N
        {kNegative, kZero, kPositive},     // Z
        {kAnySign, kPositive, kPositive},  // P
    };
    std::uint8_t out = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if ((a & (1u << i)) && (b & (1u << j))) out |= table[i][j];
    return out;
}

std::uint8_t product_signs(std::uint8_t a, std::uint8_t b) {
    static constexpr std::uint8_t table[3][3] = {
        {kPositive, kZero, kNegative},
        {kZero, kZero, kZero},
        {kNegative, kZero, kPositive},
    };
    std::uint8_t out = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if ((a & (1u << i)) && (b & (1u << j))) out |= table[i][j];
    return out;
}

std::uint8_t propagate_signs(OpCode code, const std::vector<std::uint8_t>& in) {
    std::uint8_t out = kAnySign;
    switch (code) {
        case OpCode::add: out = sum_signs(in[0], in[1]); break;
        case OpCode::sub: out = sum_signs(in[0], flip(in[1])); break;
        case OpCode::mul: out = product_signs(in[0], in[1]); break;
        case OpCode::div: out = product_signs(in[0], in[1] & static_cast<std::uint8_t>(~kZero)); break;
        case OpCode::sqrt: out = in[0] & (kZero | kPositive); break;
        case OpCode::log: out = kAnySign; break;
        case OpCode::pow: out = in[0] == kPositive ? kPositive : kAnySign; break;
        case OpCode::neg: out = flip(in[0]); break;
        case OpCode::diff:
        case OpCode::integ: out = in[0]; break;
    }
    return out == 0 ? static_cast<std::uint8_t>(kAnySign) : out;
}

bool domain_ok(DomainRule rule, std::uint8_t signs) {
    switch (rule) {
        case DomainRule::none: return true;
        case DomainRule::input_nonneg: return (signs & (kZero | kPositive)) != 0;
        case DomainRule::input_positive: return (signs & kPositive) != 0;
    }
    return true;
}

struct ShapeVerdict {
    bool ok = true;
    std::optional<Shape> out;
};

ShapeVerdict combine_shapes(const OperatorKind& kind, const std::vector<std::optional<Shape>>& in) {
    for (const auto& s : in)
        if (!s) return {true, std::nullopt};
    if (kind.arity == 1) return {true, in[0]};
    const Shape& a = *in[0];
    const Shape& b = *in[1];
    using K = Shape::Kind;
    switch (kind.code) {
        case OpCode::mul:
            if (a.kind == K::scalar) return {true, b};
            if (b.kind == K::scalar) return {true, a};
            if (a.kind == K::matrix && b.kind == K::matrix)
                return a.cols == b.rows ? ShapeVerdict{true, Shape::matrix(a.rows, b.cols)} : ShapeVerdict{false, {}};
            if (a.kind == K::matrix && b.kind == K::vector)
                return a.cols == b.rows ? ShapeVerdict{true, Shape::vector(a.rows)} : ShapeVerdict{false, {}};
            if (a.kind == K::vector && b.kind == K::matrix)
                return a.rows == b.rows ? ShapeVerdict{true, Shape::vector(b.cols)} : ShapeVerdict{false, {}};
            return a == b ? ShapeVerdict{true, a} : ShapeVerdict{false, {}};
        case OpCode::div:
        case OpCode::pow:
            if (b.kind == K::scalar || a == b) return {true, a};
            return {false, {}};
        default:
            return a == b ? ShapeVerdict{true, a} : ShapeVerdict{false, {}};
    }
}

}  // namespace

ProgramAnalysis analyze_program(const WorkflowProgram& program, const OperatorRegistry& registry) {
    ProgramAnalysis analysis;
    for (NodeId id : topological_order(program)) {
        const Node& node = *program.find(id);
        NodeFacts facts;
        if (is_source_op(node.op)) {
            facts.unit = node.unit;
            facts.shape = node.shape;
            if (node.op == kConstOp && node.value) {
                facts.constant = node.value;
                facts.signs = sign_of(*node.value);
            }
            analysis.facts.emplace(id, std::move(facts));
            continue;
        }

        const OperatorKind& kind = registry.at(node.op);
        auto inputs = node_inputs(program, id, kind.arity);
        std::vector<const NodeFacts*> in;
        in.reserve(inputs.size());
        for (const auto& src : inputs) in.push_back(&analysis.facts.at(*src));

        OperatorCheck check;
        check.node = id;

        // Units.
        bool all_tagged = true;
        for (const auto* f : in) all_tagged = all_tagged && f->unit.has_value();
        std::optional<UnitSignature> unit;
        if (kind.unit_behavior != UnitBehavior::unitless && all_tagged) {
            check.unit_checked = true;
            switch (kind.unit_behavior) {
                case UnitBehavior::additive:
                    for (const auto* f : in) check.units_ok = check.units_ok && *f->unit == *in[0]->unit;
                    if (check.units_ok) unit = in[0]->unit;
                    break;
                case UnitBehavior::multiplicative:
                    unit = *in[0]->unit;
                    for (std::size_t i = 1; i < in.size(); ++i)
                        unit = kind.code == OpCode::div ? unit->over(*in[i]->unit) : unit->times(*in[i]->unit);
                    break;
                case UnitBehavior::transform:
                    unit = in[0]->unit->shifted(node.wrt.value_or(""), kind.code == OpCode::diff ? -1 : 1);
                    break;
                case UnitBehavior::unitless: break;
            }
        }
        facts.unit = node.unit ? node.unit : unit;

        // Shapes.
        std::vector<std::optional<Shape>> shapes;
        for (const auto* f : in) shapes.push_back(f->shape);
        auto verdict = combine_shapes(kind, shapes);
        check.shape_ok = verdict.ok;
        facts.shape = node.shape ? node.shape : verdict.out;

        // Signs, with constant folding when every operand is known.
        std::vector<std::uint8_t> signs;
        bool all_constant = true;
        std::vector<double> values;
        for (const auto* f : in) {
            signs.push_back(f->signs);
            all_constant = all_constant && f->constant.has_value();
            if (f->constant) values.push_back(*f->constant);
        }
        check.type_ok = domain_ok(kind.domain_rule, signs.empty() ? static_cast<std::uint8_t>(kAnySign) : signs[0]);
        if (all_constant) {
            auto outcome = apply_operator(kind.code, values);
            if (outcome.value) {
                facts.constant = outcome.value;
                facts.signs = sign_of(*outcome.value);
            } else {
                check.type_ok = false;
                facts.signs = kAnySign;
            }
        } else {
            facts.signs = propagate_signs(kind.code, signs);
        }

        analysis.checks.push_back(check);
        analysis.facts.emplace(id, std::move(facts));
    }
    return analysis;
}

}  // namespace cgmcts
