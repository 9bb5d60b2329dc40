#include "cgmcts/program.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "cgmcts/errors.hpp"

namespace cgmcts {

using nlohmann::json;

const Node* WorkflowProgram::find(NodeId id) const noexcept {
    for (const auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

Node* WorkflowProgram::find(NodeId id) noexcept {
    for (auto& n : nodes)
        if (n.id == id) return &n;
    return nullptr;
}

NodeId WorkflowProgram::next_id() const noexcept {
    NodeId next = 0;
    for (const auto& n : nodes) next = std::max<NodeId>(next, n.id + 1);
    return next;
}

std::size_t WorkflowProgram::operator_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return !is_source_op(n.op); }));
}

std::string ValidationReport::summary() const {
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += v.message;
    }
    return out;
}

namespace {

std::string edge_label(const Edge& e) {
    return "edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + " slot " + std::to_string(e.slot);
}

std::size_t arity_of(const Node& node, const OperatorRegistry& registry) {
    if (is_source_op(node.op)) return 0;
    const auto* kind = registry.find(node.op);
    return kind ? kind->arity : 0;
}

// Kahn's algorithm over known nodes; returns the order and whether every node was placed.
std::pair<std::vector<NodeId>, bool> kahn(const WorkflowProgram& program) {
    std::map<NodeId, std::size_t> indegree;
    std::map<NodeId, std::vector<NodeId>> out;
    for (const auto& n : program.nodes) indegree.emplace(n.id, 0);
    for (const auto& e : program.edges) {
        if (!indegree.contains(e.from) || !indegree.contains(e.to)) continue;
        ++indegree[e.to];
        out[e.from].push_back(e.to);
    }
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (const auto& [id, deg] : indegree)
        if (deg == 0) ready.push(id);
    std::vector<NodeId> order;
    while (!ready.empty()) {
        NodeId id = ready.top();
        ready.pop();
        order.push_back(id);
        for (NodeId next : out[id])
            if (--indegree[next] == 0) ready.push(next);
    }
    bool complete = order.size() == indegree.size();
    return {std::move(order), complete};
}

}  // namespace

ValidationReport validate_program(const WorkflowProgram& program, const OperatorRegistry& registry) {
    ValidationReport report;
    auto add = [&](std::string msg, std::optional<NodeId> node = std::nullopt,
                   std::optional<Edge> edge = std::nullopt) {
        report.violations.push_back({std::move(msg), node, edge});
    };

    std::map<NodeId, const Node*> by_id;
    for (const auto& n : program.nodes) {
        if (!by_id.emplace(n.id, &n).second) {
            add("duplicate node id " + std::to_string(n.id), n.id);
            continue;
        }
        if (n.op == kConstOp) {
            if (!n.value) add("node " + std::to_string(n.id) + ": const source without value", n.id);
        } else if (n.op != kInputOp) {
            const auto* kind = registry.find(n.op);
            if (!kind) {
                add("node " + std::to_string(n.id) + ": unknown operator '" + n.op + "'", n.id);
            } else if (kind->unit_behavior == UnitBehavior::transform && (!n.wrt || n.wrt->empty())) {
                add("node " + std::to_string(n.id) + ": transform operator without 'wrt' dimension", n.id);
            }
        }
    }

    std::map<NodeId, std::map<std::uint32_t, std::size_t>> wired;
    for (const auto& e : program.edges) {
        auto from = by_id.find(e.from);
        auto to = by_id.find(e.to);
        if (from == by_id.end() || to == by_id.end()) {
            add(edge_label(e) + ": unknown endpoint", std::nullopt, e);
            continue;
        }
        std::size_t arity = arity_of(*to->second, registry);
        if (e.slot >= arity) {
            add(edge_label(e) + ": slot out of range for arity " + std::to_string(arity), e.to, e);
            continue;
        }
        if (++wired[e.to][e.slot] == 2)
            add("node " + std::to_string(e.to) + ": input slot " + std::to_string(e.slot) + " wired more than once",
                e.to, e);
    }

    std::set<NodeId> root_set;
    for (NodeId r : program.roots) {
        auto it = by_id.find(r);
        if (it == by_id.end()) {
            add("root " + std::to_string(r) + ": unknown node", r);
            continue;
        }
        if (!root_set.insert(r).second) add("root " + std::to_string(r) + ": listed twice", r);
        if (!is_source_op(it->second->op)) add("root " + std::to_string(r) + ": not an input/const source", r);
    }

    for (const auto& [id, node] : by_id) {
        if (is_source_op(node->op)) {
            if (!root_set.contains(id)) add("node " + std::to_string(id) + ": source not listed in roots", id);
            continue;
        }
        std::size_t arity = arity_of(*node, registry);
        for (std::uint32_t s = 0; s < arity; ++s)
            if (!wired[id].contains(s)) add("node " + std::to_string(id) + ": missing input slot " + std::to_string(s), id);
    }

    if (!by_id.contains(program.output)) {
        add("output " + std::to_string(program.output) + ": unknown node", program.output);
        return report;
    }

    auto [order, acyclic] = kahn(program);
    if (!acyclic) {
        add("cycle");
        return report;
    }

    // Reachability from any root along edges.
    std::set<NodeId> reached(root_set.begin(), root_set.end());
    for (NodeId id : order) {
        if (!reached.contains(id)) continue;
        for (const auto& e : program.edges)
            if (e.from == id) reached.insert(e.to);
    }
    if (!reached.contains(program.output)) add("output " + std::to_string(program.output) + ": not reachable from any root", program.output);
    return report;
}

void require_valid(const WorkflowProgram& program, const OperatorRegistry& registry) {
    auto report = validate_program(program, registry);
    if (!report.ok()) throw StructuralError("invalid workflow program: " + report.summary());
}

WorkflowProgram canonicalize(WorkflowProgram program) {
    std::sort(program.nodes.begin(), program.nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
    std::sort(program.edges.begin(), program.edges.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.to, a.slot, a.from) < std::tie(b.to, b.slot, b.from);
    });
    std::sort(program.roots.begin(), program.roots.end());
    return program;
}

std::vector<NodeId> topological_order(const WorkflowProgram& program) {
    auto [order, acyclic] = kahn(program);
    if (!acyclic) throw StructuralError("cycle");
    return order;
}

std::vector<std::optional<NodeId>> node_inputs(const WorkflowProgram& program, NodeId id, std::size_t arity) {
    std::vector<std::optional<NodeId>> inputs(arity);
    for (const auto& e : program.edges)
        if (e.to == id && e.slot < arity) inputs[e.slot] = e.from;
    return inputs;
}

WorkflowProgram remove_dead_nodes(WorkflowProgram program) {
    std::set<NodeId> live{program.output};
    std::vector<NodeId> stack{program.output};
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        for (const auto& e : program.edges)
            if (e.to == id && live.insert(e.from).second) stack.push_back(e.from);
    }
    std::erase_if(program.nodes, [&](const Node& n) { return !is_source_op(n.op) && !live.contains(n.id); });
    std::erase_if(program.edges, [&](const Edge& e) { return !program.find(e.to) || !program.find(e.from); });
    return program;
}

WorkflowProgram relabel_operators(WorkflowProgram program) {
    // Structural key per node: sources by id, operators by op, tags and operand keys.
    std::map<NodeId, std::vector<std::pair<std::uint32_t, NodeId>>> inputs;
    for (const auto& e : program.edges) inputs[e.to].emplace_back(e.slot, e.from);
    std::map<NodeId, std::string> memo;
    std::function<const std::string&(NodeId)> key = [&](NodeId id) -> const std::string& {
        if (auto it = memo.find(id); it != memo.end()) return it->second;
        const Node* n = program.find(id);
        std::string k;
        if (is_source_op(n->op)) {
            k = "#" + std::to_string(id);
        } else {
            k = n->op;
            if (n->wrt) k += "/" + *n->wrt;
            if (n->unit) k += "[" + n->unit->to_string() + "]";
            if (n->shape) k += "<" + n->shape->to_string() + ">";
            auto ins = inputs[id];
            std::sort(ins.begin(), ins.end());
            k += "(";
            for (const auto& [slot, from] : ins) k += key(from) + ",";
            k += ")";
        }
        return memo.emplace(id, std::move(k)).first->second;
    };

    NodeId next = 0;
    std::vector<std::pair<std::string, NodeId>> ops;
    for (const auto& n : program.nodes) {
        if (is_source_op(n.op)) {
            next = std::max(next, n.id + 1);
        } else {
            ops.emplace_back(key(n.id), n.id);
        }
    }
    std::stable_sort(ops.begin(), ops.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::map<NodeId, NodeId> rename;
    for (const auto& [k, id] : ops) rename[id] = next++;
    auto mapped = [&](NodeId id) { return rename.contains(id) ? rename[id] : id; };
    for (auto& n : program.nodes) n.id = mapped(n.id);
    for (auto& e : program.edges) {
        e.from = mapped(e.from);
        e.to = mapped(e.to);
    }
    program.output = mapped(program.output);
    return canonicalize(std::move(program));
}

// ---------------------------------------------------------------------------
// JSON

json program_to_json(const WorkflowProgram& input) {
    WorkflowProgram program = canonicalize(input);
    json nodes = json::array();
    for (const auto& n : program.nodes) {
        json j{{"id", n.id}, {"op", n.op}};
        if (n.unit) j["unit"] = n.unit->exponents();
        if (n.shape) j["shape"] = n.shape->to_string();
        if (n.value) j["value"] = *n.value;
        if (n.wrt) j["wrt"] = *n.wrt;
        nodes.push_back(std::move(j));
    }
    json edges = json::array();
    for (const auto& e : program.edges) edges.push_back({{"from", e.from}, {"to", e.to}, {"slot", e.slot}});
    return json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"roots", program.roots},
                {"output", program.output}};
}

WorkflowProgram program_from_json(const json& doc) {
    try {
        if (!doc.is_object()) throw ParseError("workflow document must be an object");
        for (const auto& key : {"nodes", "edges", "roots", "output"})
            if (!doc.contains(key)) throw ParseError(std::string("workflow document missing '") + key + "'");
        WorkflowProgram program;
        for (const auto& jn : doc.at("nodes")) {
            Node n;
            n.id = jn.at("id").get<NodeId>();
            n.op = jn.at("op").get<std::string>();
            if (jn.contains("unit")) n.unit = UnitSignature(jn.at("unit").get<std::map<std::string, int>>());
            if (jn.contains("shape")) {
                auto text = jn.at("shape").get<std::string>();
                n.shape = Shape::parse(text);
                if (!n.shape) throw ParseError("node " + std::to_string(n.id) + ": bad shape '" + text + "'");
            }
            if (jn.contains("value")) n.value = jn.at("value").get<double>();
            if (jn.contains("wrt")) n.wrt = jn.at("wrt").get<std::string>();
            program.nodes.push_back(std::move(n));
        }
        for (const auto& je : doc.at("edges"))
            program.edges.push_back({je.at("from").get<NodeId>(), je.at("to").get<NodeId>(),
                                     je.at("slot").get<std::uint32_t>()});
        program.roots = doc.at("roots").get<std::vector<NodeId>>();
        program.output = doc.at("output").get<NodeId>();
        return canonicalize(std::move(program));
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed workflow document: ") + e.what());
    }
}

std::string program_to_string(const WorkflowProgram& program) { return program_to_json(program).dump(); }

WorkflowProgram load_program(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open workflow file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
    return program_from_json(doc);
}

void save_program(const WorkflowProgram& program, const OperatorRegistry& registry, const std::string& path) {
    require_valid(program, registry);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write workflow file '" + path + "'");
    out << program_to_json(program).dump(2) << '\n';
    if (!out) throw Error("failed writing workflow file '" + path + "'");
}

}  // namespace cgmcts
