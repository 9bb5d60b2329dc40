#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "cgmcts/program.hpp"

namespace cgmcts {

/// Possible signs of a value, as a bit set.
enum SignBits : std::uint8_t { kNegative = 1, kZero = 2, kPositive = 4, kAnySign = 7 };

/// What is statically known about one node's value.
struct NodeFacts {
    std::optional<UnitSignature> unit;
    std::optional<Shape> shape;
    std::uint8_t signs = kAnySign;
    std::optional<double> constant;  ///< exact value when every ancestor is a const source
};

/// Static verdicts for one non-source node.
struct OperatorCheck {
    NodeId node = 0;
    bool unit_checked = false;  ///< member of the unit-tagged subset O_w^U
    bool units_ok = true;
    bool shape_ok = true;
    bool type_ok = true;
};

struct ProgramAnalysis {
    std::map<NodeId, NodeFacts> facts;
    std::vector<OperatorCheck> checks;  ///< topological order
};

/// Unit, shape and sign propagation over a valid program.
///
/// Units: an explicit tag on a node is its signature; otherwise additive ops
/// pass the shared signature through, multiplicative ops combine exponents,
/// transforms shift the `wrt` dimension and unitless ops drop the signature.
/// An op joins O_w^U when every operand has a known signature and its
/// behaviour is not unitless.
///
/// Shapes are only checked when all operands carry a (tagged or inferred) shape.
/// Signs come from const sources; inputs are unconstrained, so domain rules
/// fail only when a violation is provable.
ProgramAnalysis analyze_program(const WorkflowProgram& program, const OperatorRegistry& registry);

}  // namespace cgmcts
