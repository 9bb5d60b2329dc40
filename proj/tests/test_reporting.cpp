#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cgmcts/app.hpp"
#include "cgmcts/errors.hpp"
#include "cgmcts/report.hpp"
#include "support.hpp"

using namespace cgmcts;
using namespace testing_support;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig small_config() {
    RunConfig c;
    c.search.budget.rounds = 4;
    c.search.budget.simulations_per_round = 2;
    c.suite.registry = {"add", "sub", "mul", "div"};
    c.templates_per_category = 6;
    c.suite.max_program_operators = 3;
    c.category_count = 2;
    return c;
}

LogRecord rec(EventKind k, int round) {
    LogRecord r;
    r.event = k;
    r.round = round;
    return r;
}

}  // namespace

TEST(RunLogIo, RoundTrip) {
    RunLog log;
    LogRecord r = rec(EventKind::simulated, 2);
    r.node_id = 7;
    r.c_vector = ConstraintVector{};
    r.c_total = 1.01;
    r.reward = 0.5;
    r.tokens_in = 10;
    r.tokens_out = 3;
    r.role = Role::executor;
    r.reasons = {"units"};
    log.append(r);
    LogRecord w = rec(EventKind::weights_updated, 5);
    w.weights = FamilyArray::Constant(1.0 / 6);
    log.append(w);
    std::ostringstream os;
    log.write_ndjson(os);
    std::istringstream is(os.str());
    auto back = RunLog::read_ndjson(is);
    std::ostringstream again;
    back.write_ndjson(again);
    EXPECT_EQ(os.str(), again.str());
    auto first = nlohmann::json::parse(os.str().substr(0, os.str().find('\n')));
    for (const char* key : {"round", "event", "node_id", "C_vector", "C_total", "tau", "reward", "tokens_in",
                            "tokens_out"})
        EXPECT_TRUE(first.contains(key)) << key;
}

TEST(RunLogIo, MalformedLineNamed) {
    RunLog log;
    log.append(rec(EventKind::selected, 1));
    std::ostringstream os;
    log.write_ndjson(os);
    std::istringstream is(os.str() + "not json\n");
    try {
        RunLog::read_ndjson(is, "x.ndjson");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("x.ndjson:2"), std::string::npos);
    }
}

TEST(Report, Statistics) {
    std::vector<double> r{0.5, 0.7, 0.9};
    EXPECT_NEAR(mean(r), 0.7, 1e-12);
    EXPECT_NEAR(population_stddev(r), std::sqrt(0.08 / 3.0), 1e-12);
    EXPECT_NEAR(population_stddev(r), 0.1633, 1e-4);
}

TEST(Report, SummaryFromLog) {
    RunLog log;
    LogRecord start = rec(EventKind::started, 0);
    start.n_problems = 2;
    start.prices = PriceMap{{Role::executor, {1e-3, 0}}, {Role::optimizer, {0, 0}}};
    log.append(start);
    LogRecord e = rec(EventKind::expanded, 1);
    e.proposed = 3;
    e.role = Role::optimizer;
    e.tokens_in = 10;
    e.tokens_out = 0;
    log.append(e);
    log.append(rec(EventKind::pruned, 1));
    for (auto [round, reward] : {std::pair{1, 0.5}, {2, 0.7}, {2, 0.2}, {3, 0.9}}) {
        LogRecord s = rec(EventKind::simulated, round);
        s.reward = reward;
        s.role = Role::executor;
        s.tokens_in = 5;
        s.tokens_out = 5;
        log.append(s);
    }
    auto s = summarize(log);
    EXPECT_NEAR(s.pruning_rate(), 1.0 / 3.0, 1e-12);
    EXPECT_EQ(s.round_scores, (std::vector<double>{0.5, 0.7, 0.9}));
    EXPECT_NEAR(s.score_stddev, 0.163299, 1e-6);
    EXPECT_DOUBLE_EQ(s.tokens_per_problem, 50.0 / 2.0);
    ASSERT_TRUE(s.cost);
    EXPECT_NEAR(*s.cost, 20 * 1e-3 / 2.0, 1e-15);
    EXPECT_EQ(variance_ratio(s, s), 1.0);
    EXPECT_NE(format_summary_table({s}).find("33.3"), std::string::npos);
}

TEST(Config, ParsesAndRejects) {
    auto c = config_from_json(nlohmann::json::parse(
        R"({"seed": 7, "aggregation": {"lambda": 0.0}, "families": {"units": false}, "budget": {"rounds": 3}})"));
    EXPECT_EQ(c.seed(), 7u);
    EXPECT_EQ(c.search.aggregation.lambda_shaping, 0.0);
    EXPECT_FALSE(c.search.families[Family::units]);
    EXPECT_EQ(c.search.budget.rounds, 3);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"sed": 7})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"budget": {"round": 7}})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(
                     R"({"stages": {"selection": false, "expansion": false, "simulation": false, "backprop": false}})")),
                 ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"budget": {"rounds": "many"}})")), ConfigError);
    auto again = config_from_json(config_to_json(c));
    EXPECT_EQ(config_to_json(again), config_to_json(c));
}

TEST(App, RunWritesDeterministicArtifacts) {
    auto base = std::filesystem::temp_directory_path() / "cgmcts_app_test";
    std::filesystem::remove_all(base);
    auto cfg = small_config();
    execute_run(cfg, base / "a");
    execute_run(cfg, base / "b");
    for (const char* f : {"runlog_cat0.ndjson", "runlog_cat1.ndjson", "best_workflow_cat0.json", "motifs.json",
                          "summary.json"}) {
        ASSERT_TRUE(std::filesystem::exists(base / "a" / f)) << f;
        EXPECT_EQ(slurp(base / "a" / f), slurp(base / "b" / f)) << f;
    }
    auto lib = library_from_json(nlohmann::json::parse(slurp(base / "a" / "motifs.json")));
    EXPECT_TRUE(lib.frozen());
    std::filesystem::remove_all(base);
}

TEST(App, ExportTargetReevaluates) {
    auto cfg = small_config();
    auto w = build_workload(cfg);
    auto path = std::filesystem::temp_directory_path() / "cgmcts_target.json";
    export_workflow(w.targets[0].second, w.registry, path);
    SyntheticEvaluator ev(w.registry);
    EXPECT_EQ(ev.evaluate(load_program(path.string()), w.problems.test.for_category("cat0")).reward, 1.0);
    std::filesystem::remove(path);
}

TEST(App, AblationNeutrality) {
    auto cfg = small_config();
    cfg.category_count = 1;
    auto grid = ablation_grid(cfg);
    ASSERT_EQ(grid.size(), 12u);
    auto full = optimize(cfg);
    for (const auto& [name, variant] : grid) {
        auto outcome = optimize(variant);
        for (const auto& r : outcome.categories[0].log.records()) {
            if (!r.c_vector) continue;
            for (auto f : kAllFamilies)
                if (!variant.search.families[f]) ASSERT_EQ((*r.c_vector)[f], 0.5) << name;
        }
    }
    (void)full;
}

TEST(App, ExternalExecutorUnreachableFails) {
    auto cfg = small_config();
    cfg.executor = "external:http://127.0.0.1:1/rpc";
    EXPECT_THROW(optimize(cfg), AdapterError);
}
