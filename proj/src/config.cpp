#include "cgmcts/config.hpp"

#include <fstream>
#include <set>

#include "cgmcts/errors.hpp"

namespace cgmcts {

using nlohmann::json;

namespace {

void check_keys(const json& section, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!section.is_object()) throw ConfigError(where + ": expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : section.items())
        if (!ok.contains(key)) throw ConfigError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
}

template <class T>
void read(const json& section, const char* key, T& target, const std::string& where) {
    if (!section.contains(key)) return;
    try {
        target = section.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad value for '" + where + "." + key + "'");
    }
}

const json* section(const json& doc, const char* key) { return doc.contains(key) ? &doc.at(key) : nullptr; }

}  // namespace

RunConfig config_from_json(const json& doc) {
    RunConfig c;
    check_keys(doc, "", {"seed", "aggregation", "threshold", "depth_diversity", "magnitude", "adaptation", "budget",
                         "motifs", "prices", "executor", "families", "stages", "problems"});
    auto& s = c.search;
    read(doc, "seed", s.budget.seed, "");
    read(doc, "executor", c.executor, "");

    if (auto* j = section(doc, "aggregation")) {
        check_keys(*j, "aggregation", {"epsilon", "lambda", "uct_c"});
        read(*j, "epsilon", s.aggregation.epsilon, "aggregation");
        read(*j, "lambda", s.aggregation.lambda_shaping, "aggregation");
        read(*j, "uct_c", s.aggregation.uct_c, "aggregation");
    }
    if (auto* j = section(doc, "threshold")) {
        check_keys(*j, "threshold", {"tau0", "tau_min", "k"});
        read(*j, "tau0", s.schedule.tau0, "threshold");
        read(*j, "tau_min", s.schedule.tau_min, "threshold");
        read(*j, "k", s.schedule.decay_k, "threshold");
    }
    if (auto* j = section(doc, "depth_diversity")) {
        check_keys(*j, "depth_diversity", {"d_max", "beta"});
        read(*j, "d_max", s.depth_diversity.d_max, "depth_diversity");
        read(*j, "beta", s.depth_diversity.beta, "depth_diversity");
    }
    if (auto* j = section(doc, "magnitude")) {
        check_keys(*j, "magnitude", {"gamma", "delta"});
        read(*j, "gamma", s.magnitude.gamma, "magnitude");
        read(*j, "delta", s.magnitude.delta, "magnitude");
    }
    if (auto* j = section(doc, "adaptation")) {
        check_keys(*j, "adaptation", {"eta", "alpha", "warmup_rounds", "window", "adaptive"});
        read(*j, "eta", s.adaptation.eta, "adaptation");
        read(*j, "alpha", s.adaptation.alpha, "adaptation");
        read(*j, "warmup_rounds", s.adaptation.warmup_rounds, "adaptation");
        read(*j, "window", s.observation_window, "adaptation");
        read(*j, "adaptive", s.adaptive_weights, "adaptation");
    }
    if (auto* j = section(doc, "budget")) {
        check_keys(*j, "budget", {"rounds", "simulations_per_round", "max_candidates_per_expansion", "parallel"});
        read(*j, "rounds", s.budget.rounds, "budget");
        read(*j, "simulations_per_round", s.budget.simulations_per_round, "budget");
        read(*j, "max_candidates_per_expansion", s.budget.max_candidates_per_expansion, "budget");
        read(*j, "parallel", s.parallel_simulations, "budget");
    }
    if (auto* j = section(doc, "motifs")) {
        check_keys(*j, "motifs", {"templates_per_category", "refinement_period", "cluster_count", "min_separation",
                                  "max_per_category", "kmeans_iterations"});
        read(*j, "templates_per_category", c.templates_per_category, "motifs");
        read(*j, "refinement_period", c.motifs.refinement_period, "motifs");
        read(*j, "cluster_count", c.motifs.cluster_count, "motifs");
        read(*j, "min_separation", c.motifs.min_separation, "motifs");
        read(*j, "max_per_category", c.motifs.max_per_category, "motifs");
        read(*j, "kmeans_iterations", c.motifs.kmeans_iterations, "motifs");
    }
    if (auto* j = section(doc, "prices")) {
        check_keys(*j, "prices", {"optimizer", "executor"});
        for (Role role : {Role::optimizer, Role::executor}) {
            const std::string name(role_name(role));
            if (!j->contains(name)) continue;
            const auto& p = j->at(name);
            check_keys(p, "prices." + name, {"input", "output"});
            read(p, "input", c.prices[role].input, "prices." + name);
            read(p, "output", c.prices[role].output, "prices." + name);
        }
    }
    if (auto* j = section(doc, "families")) {
        check_keys(*j, "families", {"units", "types", "pattern", "magnitude", "depth", "diversity"});
        for (auto f : kAllFamilies) read(*j, std::string(family_name(f)).c_str(), s.families[f], "families");
    }
    if (auto* j = section(doc, "stages")) {
        check_keys(*j, "stages", {"selection", "expansion", "simulation", "backprop"});
        for (auto st : kAllStages) read(*j, std::string(stage_name(st)).c_str(), s.stages[st], "stages");
    }
    if (auto* j = section(doc, "problems")) {
        check_keys(*j, "problems", {"count", "categories", "file", "initial_program", "registry",
                                    "max_program_operators", "min_target_operators", "max_target_operators",
                                    "input_low", "input_high", "split_ratio", "abs_tol", "rel_tol"});
        read(*j, "count", c.problem_count, "problems");
        read(*j, "categories", c.category_count, "problems");
        std::string file, initial;
        read(*j, "file", file, "problems");
        read(*j, "initial_program", initial, "problems");
        if (!file.empty()) c.problem_file = file;
        if (!initial.empty()) c.initial_program = initial;
        read(*j, "registry", c.suite.registry, "problems");
        read(*j, "max_program_operators", c.suite.max_program_operators, "problems");
        read(*j, "min_target_operators", c.suite.min_target_operators, "problems");
        read(*j, "max_target_operators", c.suite.max_target_operators, "problems");
        read(*j, "input_low", c.suite.input_low, "problems");
        read(*j, "input_high", c.suite.input_high, "problems");
        if (j->contains("split_ratio")) {
            std::vector<int> ratio;
            read(*j, "split_ratio", ratio, "problems");
            if (ratio.size() != 2) throw ConfigError("problems.split_ratio needs two entries");
            c.suite.validation_share = ratio[0];
            c.suite.test_share = ratio[1];
        }
        read(*j, "abs_tol", c.tolerance.absolute, "problems");
        read(*j, "rel_tol", c.tolerance.relative, "problems");
    }
    validate_config(c);
    return c;
}

json config_to_json(const RunConfig& c) {
    const auto& s = c.search;
    json families = json::object();
    for (auto f : kAllFamilies) families[std::string(family_name(f))] = s.families[f];
    json stages = json::object();
    for (auto st : kAllStages) stages[std::string(stage_name(st))] = s.stages[st];
    json prices = json::object();
    for (const auto& [role, p] : c.prices) prices[std::string(role_name(role))] = {{"input", p.input}, {"output", p.output}};
    json problems{{"count", c.problem_count},
                  {"categories", c.category_count},
                  {"registry", c.suite.registry},
                  {"max_program_operators", c.suite.max_program_operators},
                  {"min_target_operators", c.suite.min_target_operators},
                  {"max_target_operators", c.suite.max_target_operators},
                  {"input_low", c.suite.input_low},
                  {"input_high", c.suite.input_high},
                  {"split_ratio", {c.suite.validation_share, c.suite.test_share}},
                  {"abs_tol", c.tolerance.absolute},
                  {"rel_tol", c.tolerance.relative}};
    if (c.problem_file) problems["file"] = *c.problem_file;
    if (c.initial_program) problems["initial_program"] = *c.initial_program;
    return json{
        {"seed", s.budget.seed},
        {"executor", c.executor},
        {"aggregation", {{"epsilon", s.aggregation.epsilon}, {"lambda", s.aggregation.lambda_shaping}, {"uct_c", s.aggregation.uct_c}}},
        {"threshold", {{"tau0", s.schedule.tau0}, {"tau_min", s.schedule.tau_min}, {"k", s.schedule.decay_k}}},
        {"depth_diversity", {{"d_max", s.depth_diversity.d_max}, {"beta", s.depth_diversity.beta}}},
        {"magnitude", {{"gamma", s.magnitude.gamma}, {"delta", s.magnitude.delta}}},
        {"adaptation", {{"eta", s.adaptation.eta}, {"alpha", s.adaptation.alpha}, {"warmup_rounds", s.adaptation.warmup_rounds},
                        {"window", s.observation_window}, {"adaptive", s.adaptive_weights}}},
        {"budget", {{"rounds", s.budget.rounds}, {"simulations_per_round", s.budget.simulations_per_round},
                    {"max_candidates_per_expansion", s.budget.max_candidates_per_expansion}, {"parallel", s.parallel_simulations}}},
        {"motifs", {{"templates_per_category", c.templates_per_category}, {"refinement_period", c.motifs.refinement_period},
                    {"cluster_count", c.motifs.cluster_count}, {"min_separation", c.motifs.min_separation},
                    {"max_per_category", c.motifs.max_per_category}, {"kmeans_iterations", c.motifs.kmeans_iterations}}},
        {"prices", prices},
        {"families", families},
        {"stages", stages},
        {"problems", problems},
    };
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(doc);
}

void validate_config(const RunConfig& c) {
    const auto& s = c.search;
    if (!(s.aggregation.epsilon > 0)) throw ConfigError("aggregation.epsilon must be positive");
    if (s.aggregation.lambda_shaping < 0) throw ConfigError("aggregation.lambda must be non-negative");
    if (s.aggregation.uct_c < 0) throw ConfigError("aggregation.uct_c must be non-negative");
    if (s.schedule.tau_min > s.schedule.tau0) throw ConfigError("threshold.tau_min exceeds tau0");
    if (s.schedule.decay_k < 0) throw ConfigError("threshold.k must be non-negative");
    if (s.depth_diversity.d_max < 0 || s.depth_diversity.beta < 0) throw ConfigError("depth_diversity values must be non-negative");
    if (s.magnitude.gamma < 0 || s.magnitude.delta < 0) throw ConfigError("magnitude values must be non-negative");
    if (s.adaptation.eta < 0 || s.adaptation.alpha < 0 || s.adaptation.alpha > 1)
        throw ConfigError("adaptation.alpha must lie in [0, 1] and eta be non-negative");
    if (s.observation_window < 2) throw ConfigError("adaptation.window must be at least 2");
    if (s.budget.rounds < 0 || s.budget.simulations_per_round < 0) throw ConfigError("budget values must be non-negative");
    if (s.budget.max_candidates_per_expansion == 0) throw ConfigError("budget.max_candidates_per_expansion must be positive");
    if (!s.families.any()) throw ConfigError("at least one constraint family must be enabled");
    if (!s.stages.any()) throw ConfigError("at least one search stage must be enabled");
    if (c.motifs.refinement_period < 1) throw ConfigError("motifs.refinement_period must be positive");
    if (c.motifs.cluster_count < 1) throw ConfigError("motifs.cluster_count must be positive");
    if (c.motifs.min_separation < 0 || c.motifs.min_separation > 2) throw ConfigError("motifs.min_separation outside [0, 2]");
    if (c.motifs.max_per_category == 0) throw ConfigError("motifs.max_per_category must be positive");
    for (const auto& [role, p] : c.prices)
        if (p.input < 0 || p.output < 0) throw ConfigError("prices must be non-negative");
    if (c.executor != "synthetic" && c.executor.rfind("external:", 0) != 0)
        throw ConfigError("executor must be 'synthetic' or 'external:<address>'");
    if (c.problem_file && !c.initial_program) throw ConfigError("problems.file requires problems.initial_program");
    if (!c.problem_file) {
        if (c.problem_count < 5) throw ConfigError("problems.count must be at least 5");
        if (c.category_count < 1) throw ConfigError("problems.categories must be positive");
    }
    if (c.tolerance.absolute < 0 || c.tolerance.relative < 0) throw ConfigError("tolerances must be non-negative");
}

}  // namespace cgmcts
