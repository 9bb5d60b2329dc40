#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgmcts/operators.hpp"
#include "cgmcts/units.hpp"

namespace cgmcts {

using NodeId = std::uint32_t;

struct Node {
    NodeId id = 0;
    std::string op;
    std::optional<UnitSignature> unit;
    std::optional<Shape> shape;
    std::optional<double> value;  ///< const sources only
    std::optional<std::string> wrt;  ///< transform operators only

    friend bool operator==(const Node&, const Node&) = default;
};

/// producer -> consumer, feeding the consumer's input slot `slot`.
struct Edge {
    NodeId from = 0;
    NodeId to = 0;
    std::uint32_t slot = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// A complete workflow: a DAG of operator nodes over input/const sources.
struct WorkflowProgram {
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::vector<NodeId> roots;
    NodeId output = 0;

    [[nodiscard]] const Node* find(NodeId id) const noexcept;
    [[nodiscard]] Node* find(NodeId id) noexcept;
    [[nodiscard]] NodeId next_id() const noexcept;
    [[nodiscard]] std::size_t operator_count() const noexcept;

    friend bool operator==(const WorkflowProgram&, const WorkflowProgram&) = default;
};

struct Violation {
    std::string message;
    std::optional<NodeId> node;
    std::optional<Edge> edge;
};

struct ValidationReport {
    std::vector<Violation> violations;
    [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
    [[nodiscard]] std::string summary() const;
};

ValidationReport validate_program(const WorkflowProgram& program, const OperatorRegistry& registry);

/// Throws StructuralError with the violation summary unless the program is valid.
void require_valid(const WorkflowProgram& program, const OperatorRegistry& registry);

/// Sorts nodes by id, edges by (consumer, slot) and roots ascending.
WorkflowProgram canonicalize(WorkflowProgram program);

/// Topological order with smallest-id-first tie breaking. Throws StructuralError on a cycle.
std::vector<NodeId> topological_order(const WorkflowProgram& program);

/// Producers of `id` ordered by slot; entries are empty for unwired slots.
std::vector<std::optional<NodeId>> node_inputs(const WorkflowProgram& program, NodeId id, std::size_t arity);

/// Renumbers operator nodes by structural content so that isomorphic programs
/// compare equal. Sources keep their ids; operators follow the largest source id.
/// The program must be acyclic with every referenced node present.
WorkflowProgram relabel_operators(WorkflowProgram program);

/// Drops non-source nodes that do not feed the output.
WorkflowProgram remove_dead_nodes(WorkflowProgram program);

// JSON document: {"nodes":[{id,op,unit?,shape?,value?,wrt?}], "edges":[{from,to,slot}], "roots":[...], "output":id}
nlohmann::json program_to_json(const WorkflowProgram& program);
WorkflowProgram program_from_json(const nlohmann::json& doc);
std::string program_to_string(const WorkflowProgram& program);  ///< canonical compact dump
WorkflowProgram load_program(const std::string& path);
/// Validates, then writes the canonical pretty-printed document. Throws on invalid program or I/O failure.
void save_program(const WorkflowProgram& program, const OperatorRegistry& registry, const std::string& path);

}  // namespace cgmcts
