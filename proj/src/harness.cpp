#include "cgmcts/harness.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cgmcts/errors.hpp"
#include "cgmcts/random.hpp"

namespace cgmcts {

using nlohmann::json;

ProblemSet ProblemSet::for_category(const std::string& category) const {
    ProblemSet out;
    out.split = split;
    for (const auto& p : problems)
        if (p.category == category) out.problems.push_back(p);
    return out;
}

std::vector<std::string> ProblemSet::categories() const {
    std::vector<std::string> out;
    for (const auto& p : problems)
        if (std::find(out.begin(), out.end(), p.category) == out.end()) out.push_back(p.category);
    return out;
}

SplitProblems split_problems(const std::vector<Problem>& problems, int validation_share, int test_share) {
    if (validation_share <= 0 || test_share < 0) throw ConfigError("split ratio must be positive");
    SplitProblems out;
    out.validation.split = Split::validation;
    out.test.split = Split::test;
    ProblemSet all{problems, Split::validation};
    std::set<const Problem*> to_validation;
    for (const auto& category : all.categories()) {
        std::vector<const Problem*> members;
        for (const auto& p : problems)
            if (p.category == category) members.push_back(&p);
        std::size_t n_val = members.size() * static_cast<std::size_t>(validation_share) /
                            static_cast<std::size_t>(validation_share + test_share);
        n_val = std::max<std::size_t>(n_val, 1);
        for (std::size_t i = 0; i < n_val; ++i) to_validation.insert(members[i]);
    }
    for (const auto& p : problems) (to_validation.contains(&p) ? out.validation : out.test).problems.push_back(p);
    return out;
}

json problems_to_json(const std::vector<Problem>& problems, int validation_share, int test_share) {
    json list = json::array();
    for (const auto& p : problems) {
        json inputs = json::object();
        for (const auto& [id, v] : p.inputs) inputs[std::to_string(id)] = v;
        list.push_back({{"inputs", inputs}, {"expected", p.expected}, {"category", p.category},
                        {"constants", p.constants}});
    }
    return json{{"problems", list}, {"split_ratio", {validation_share, test_share}}};
}

SplitProblems problems_from_json(const json& doc) {
    try {
        std::vector<Problem> problems;
        for (const auto& jp : doc.at("problems")) {
            Problem p;
            for (const auto& [key, v] : jp.at("inputs").items()) p.inputs[static_cast<NodeId>(std::stoul(key))] = v.get<double>();
            p.expected = jp.at("expected").get<double>();
            p.category = jp.value("category", std::string("default"));
            if (jp.contains("constants")) p.constants = jp.at("constants").get<std::vector<double>>();
            problems.push_back(std::move(p));
        }
        int v = 1, t = 4;
        if (doc.contains("split_ratio")) {
            auto ratio = doc.at("split_ratio").get<std::vector<int>>();
            if (ratio.size() != 2) throw ParseError("split_ratio must have two entries");
            v = ratio[0];
            t = ratio[1];
        }
        return split_problems(problems, v, t);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed problem set: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw ParseError("problem input keys must be node ids");
    }
}

// ---------------------------------------------------------------------------
// Proposer

SyntheticProposer::SyntheticProposer(OperatorRegistry registry, ProposerOptions options)
    : registry_(std::move(registry)), options_(options) {}

namespace {

std::vector<std::string> unit_dimensions(const WorkflowProgram& program) {
    std::set<std::string> dims;
    for (const auto& n : program.nodes)
        if (n.unit)
            for (const auto& [d, _] : n.unit->exponents()) dims.insert(d);
    return {dims.begin(), dims.end()};
}

bool depends_on(const WorkflowProgram& program, NodeId node, NodeId ancestor) {
    // true when `ancestor` can reach `node`
    std::vector<NodeId> stack{node};
    std::set<NodeId> seen;
    while (!stack.empty()) {
        NodeId id = stack.back();
        stack.pop_back();
        if (id == ancestor) return true;
        if (!seen.insert(id).second) continue;
        for (const auto& e : program.edges)
            if (e.to == id) stack.push_back(e.from);
    }
    return false;
}

}  // namespace

std::vector<WorkflowProgram> SyntheticProposer::enumerate(const WorkflowProgram& program) const {
    std::vector<WorkflowProgram> out;
    std::set<std::string> seen{program_to_string(program), program_to_string(relabel_operators(program))};
    auto emit = [&](WorkflowProgram candidate) {
        candidate = remove_dead_nodes(std::move(candidate));
        if (!validate_program(candidate, registry_).ok()) return;
        candidate = relabel_operators(std::move(candidate));
        if (seen.insert(program_to_string(candidate)).second) out.push_back(std::move(candidate));
    };
    const auto dims = unit_dimensions(program);

    auto variants_for = [&](const OperatorKind& kind) {
        std::vector<std::optional<std::string>> wrts;
        if (kind.unit_behavior == UnitBehavior::transform) {
            for (const auto& d : dims) wrts.emplace_back(d);
        } else {
            wrts.emplace_back(std::nullopt);
        }
        return wrts;
    };

    // Insertions: at the output, then on each edge.
    if (program.operator_count() < options_.max_operators) {
        struct Point {
            NodeId carried;
            std::optional<std::size_t> edge;
        };
        std::vector<Point> points{{program.output, std::nullopt}};
        for (std::size_t i = 0; i < program.edges.size(); ++i) points.push_back({program.edges[i].from, i});

        for (const auto& point : points) {
            for (const auto& kind : registry_.kinds()) {
                std::vector<std::vector<NodeId>> layouts;
                if (kind.arity == 1) {
                    layouts.push_back({point.carried});
                } else if (kind.arity == 2) {
                    for (NodeId r : program.roots) {
                        layouts.push_back({point.carried, r});
                        if (r != point.carried) layouts.push_back({r, point.carried});
                    }
                } else {
                    continue;
                }
                for (const auto& wrt : variants_for(kind)) {
                    for (const auto& operands : layouts) {
                        WorkflowProgram c = program;
                        const NodeId n = c.next_id();
                        c.nodes.push_back(Node{n, kind.name, std::nullopt, std::nullopt, std::nullopt, wrt});
                        for (std::uint32_t s = 0; s < operands.size(); ++s) c.edges.push_back({operands[s], n, s});
                        if (point.edge) {
                            c.edges[*point.edge].from = n;
                        } else {
                            c.output = n;
                        }
                        emit(std::move(c));
                    }
                }
            }
        }
    }

    // Replacements with a same-arity operator.
    for (const auto& node : program.nodes) {
        if (is_source_op(node.op)) continue;
        const auto& current = registry_.at(node.op);
        for (const auto& kind : registry_.kinds()) {
            if (kind.name == node.op || kind.arity != current.arity) continue;
            for (const auto& wrt : variants_for(kind)) {
                WorkflowProgram c = program;
                Node* target = c.find(node.id);
                target->op = kind.name;
                target->wrt = wrt;
                emit(std::move(c));
            }
        }
    }

    // Deletion of unary nodes.
    for (const auto& node : program.nodes) {
        if (is_source_op(node.op) || registry_.at(node.op).arity != 1) continue;
        WorkflowProgram c = program;
        NodeId input = *node_inputs(program, node.id, 1)[0];
        std::erase_if(c.edges, [&](const Edge& e) { return e.to == node.id; });
        for (auto& e : c.edges)
            if (e.from == node.id) e.from = input;
        if (c.output == node.id) c.output = input;
        std::erase_if(c.nodes, [&](const Node& n) { return n.id == node.id; });
        emit(std::move(c));
    }

    // Rewire one input slot.
    for (const auto& node : program.nodes) {
        if (is_source_op(node.op)) continue;
        const auto arity = registry_.at(node.op).arity;
        auto inputs = node_inputs(program, node.id, arity);
        for (std::uint32_t s = 0; s < arity; ++s) {
            for (const auto& source : program.nodes) {
                if (source.id == node.id || source.id == inputs[s]) continue;
                if (depends_on(program, source.id, node.id)) continue;
                WorkflowProgram c = program;
                for (auto& e : c.edges)
                    if (e.to == node.id && e.slot == s) e.from = source.id;
                emit(std::move(c));
            }
        }
    }
    return out;
}

std::int64_t program_token_size(const WorkflowProgram& program) {
    return 4 + 6 * static_cast<std::int64_t>(program.nodes.size()) + 3 * static_cast<std::int64_t>(program.edges.size());
}

Proposal SyntheticProposer::propose(const WorkflowProgram& program, std::size_t count, std::uint64_t seed) {
    require_valid(program, registry_);
    Proposal proposal;
    auto all = enumerate(program);
    if (all.size() > count) {
        std::vector<std::size_t> idx(all.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        Rng rng(seed);
        shuffle_in_place(idx, rng);
        idx.resize(count);
        std::sort(idx.begin(), idx.end());
        for (auto i : idx) proposal.candidates.push_back(std::move(all[i]));
    } else {
        proposal.candidates = std::move(all);
    }
    proposal.usage.role = Role::optimizer;
    proposal.usage.prompt_tokens = 16 + program_token_size(program);
    for (const auto& c : proposal.candidates) proposal.usage.completion_tokens += program_token_size(c);
    return proposal;
}

// ---------------------------------------------------------------------------
// Evaluator

SyntheticEvaluator::SyntheticEvaluator(OperatorRegistry registry, Tolerance tolerance)
    : registry_(std::move(registry)), tolerance_(tolerance) {}

Evaluation SyntheticEvaluator::evaluate(const WorkflowProgram& program, const ProblemSet& problems) {
    if (problems.empty()) throw InputError("evaluate: empty problem set");
    Evaluation eval;
    eval.usage.role = Role::executor;
    std::size_t correct = 0;
    const auto size = program_token_size(program);
    for (const auto& problem : problems.problems) {
        ExecutionTrace trace = interpret(program, registry_, problem.inputs);
        if (!problem.constants.empty()) trace.inputs = problem.constants;
        if (trace.success && trace.output) {
            double err = std::abs(*trace.output - problem.expected);
            if (err <= tolerance_.absolute + tolerance_.relative * std::abs(problem.expected)) ++correct;
        }
        eval.usage.prompt_tokens += size + 2 * static_cast<std::int64_t>(problem.inputs.size());
        eval.usage.completion_tokens += 1 + static_cast<std::int64_t>(trace.intermediates.size());
        eval.traces.push_back(std::move(trace));
    }
    eval.reward = static_cast<double>(correct) / static_cast<double>(problems.size());
    return eval;
}

// ---------------------------------------------------------------------------
// Accounting

namespace {

std::vector<TokenRecord> token_records(const RunLog& log) {
    std::vector<TokenRecord> out;
    for (const auto& r : log.records()) {
        if (!r.tokens_in && !r.tokens_out) continue;
        TokenRecord t;
        if (!r.role) throw ConfigError("token record without a role");
        t.role = *r.role;
        t.prompt_tokens = r.tokens_in.value_or(0);
        t.completion_tokens = r.tokens_out.value_or(0);
        t.request_id = r.request_id.value_or("");
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace

double tokens_per_problem(const std::vector<TokenRecord>& records, std::size_t n_problems) {
    if (n_problems == 0) throw ContractViolation("tokens_per_problem needs n_problems >= 1");
    std::int64_t total = 0;
    for (const auto& r : records) total += r.prompt_tokens + r.completion_tokens;
    return static_cast<double>(total) / static_cast<double>(n_problems);
}

double tokens_per_problem(const RunLog& log, std::size_t n_problems) {
    if (n_problems == 0) throw ContractViolation("tokens_per_problem needs n_problems >= 1");
    std::int64_t total = 0;
    for (const auto& r : log.records()) total += r.tokens_in.value_or(0) + r.tokens_out.value_or(0);
    return static_cast<double>(total) / static_cast<double>(n_problems);
}

double cost(const std::vector<TokenRecord>& records, const PriceMap& prices, std::size_t n_problems) {
    if (n_problems == 0) throw ContractViolation("cost needs n_problems >= 1");
    double total = 0.0;
    for (const auto& r : records) {
        auto it = prices.find(r.role);
        if (it == prices.end()) throw ConfigError("no price for role '" + std::string(role_name(r.role)) + "'");
        total += static_cast<double>(r.prompt_tokens) * it->second.input +
                 static_cast<double>(r.completion_tokens) * it->second.output;
    }
    return total / static_cast<double>(n_problems);
}

double cost(const RunLog& log, const PriceMap& prices, std::size_t n_problems) {
    return cost(token_records(log), prices, n_problems);
}

}  // namespace cgmcts
