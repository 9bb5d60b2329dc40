#include "cgmcts/suite.hpp"

#include <algorithm>
#include <cmath>

#include "cgmcts/analysis.hpp"
#include "cgmcts/errors.hpp"
#include "cgmcts/random.hpp"

namespace cgmcts {

std::string category_name(std::size_t index) { return "cat" + std::to_string(index); }

const WorkflowProgram& SyntheticSuite::target(const std::string& category) const {
    for (const auto& [name, program] : targets)
        if (name == category) return program;
    throw InputError("no target for category '" + category + "'");
}

namespace {

WorkflowProgram initial_program(const std::vector<SourceSpec>& sources) {
    if (sources.empty()) throw ConfigError("suite needs at least one source");
    WorkflowProgram p;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        Node n;
        n.id = static_cast<NodeId>(i);
        n.op = sources[i].value ? std::string(kConstOp) : std::string(kInputOp);
        n.unit = sources[i].unit;
        n.value = sources[i].value;
        p.nodes.push_back(n);
        p.roots.push_back(n.id);
    }
    p.output = 0;
    return p;
}

bool acceptable(const WorkflowProgram& candidate, const OperatorRegistry& registry, const SuiteOptions& options,
                const std::vector<Problem*>& problems) {
    const auto ops = candidate.operator_count();
    if (ops < options.min_target_operators || ops > options.max_target_operators) return false;
    for (const auto& check : analyze_program(candidate, registry).checks)
        if (!check.units_ok || !check.shape_ok || !check.type_ok) return false;
    std::vector<double> outputs;
    for (const auto* problem : problems) {
        auto trace = interpret(candidate, registry, problem->inputs);
        if (!trace.success) return false;
        outputs.push_back(*trace.output);
    }
    if (std::all_of(outputs.begin(), outputs.end(), [&](double v) { return v == outputs.front(); })) return false;
    // a target that merely reproduces one input is solved by the initial program
    for (const auto& [id, _] : problems.front()->inputs) {
        bool same = true;
        for (std::size_t i = 0; i < problems.size() && same; ++i) same = problems[i]->inputs.at(id) == outputs[i];
        if (same) return false;
    }
    return true;
}

}  // namespace

SyntheticSuite make_synthetic_suite(std::uint64_t seed, std::size_t n_problems, std::size_t category_count,
                                    const SuiteOptions& options) {
    if (n_problems < 5) throw InputError("a synthetic suite needs at least 5 problems");
    if (category_count == 0) throw InputError("a synthetic suite needs at least one category");
    if (options.input_high < options.input_low) throw ConfigError("input_high < input_low");
    if (options.min_target_operators > options.max_target_operators)
        throw ConfigError("min_target_operators > max_target_operators");

    SyntheticSuite suite;
    suite.registry = OperatorRegistry::from_names(options.registry);
    suite.initial = initial_program(options.sources);

    std::vector<Problem> problems(n_problems);
    Rng input_rng(derive_seed(seed, 1));
    const auto span = static_cast<std::size_t>(options.input_high - options.input_low + 1);
    for (std::size_t i = 0; i < n_problems; ++i) {
        auto& p = problems[i];
        p.category = category_name(i % category_count);
        for (const auto& node : suite.initial.nodes) {
            if (node.op == kInputOp) {
                double v = options.input_low + static_cast<double>(uniform_index(input_rng, span));
                p.inputs[node.id] = v;
                p.constants.push_back(v);
            } else {
                p.constants.push_back(*node.value);
            }
        }
    }

    SyntheticProposer walker(suite.registry, ProposerOptions{options.max_target_operators});
    for (std::size_t c = 0; c < category_count; ++c) {
        const auto category = category_name(c);
        std::vector<Problem*> members;
        for (auto& p : problems)
            if (p.category == category) members.push_back(&p);

        Rng rng(derive_seed(seed, 1000 + c));
        std::optional<WorkflowProgram> found;
        for (int attempt = 0; attempt < options.max_retries && !found; ++attempt) {
            const std::size_t goal =
                options.min_target_operators +
                uniform_index(rng, options.max_target_operators - options.min_target_operators + 1);
            WorkflowProgram current = suite.initial;
            for (std::size_t step = 0; step < 4 * goal + 4 && current.operator_count() != goal; ++step) {
                auto next = walker.enumerate(current);
                if (next.empty()) break;
                current = std::move(next[uniform_index(rng, next.size())]);
            }
            bool duplicate = std::any_of(suite.targets.begin(), suite.targets.end(),
                                         [&](const auto& t) { return t.second == current; });
            if (!duplicate && acceptable(current, suite.registry, options, members)) found = current;
        }
        if (!found) throw Error("no acceptable target found for " + category);
        for (auto* p : members) p->expected = *interpret(*found, suite.registry, p->inputs).output;
        suite.targets.emplace_back(category, std::move(*found));
    }

    suite.problems = split_problems(problems, options.validation_share, options.test_share);
    return suite;
}

}  // namespace cgmcts
