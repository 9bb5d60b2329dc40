#include <thread>

#include <gtest/gtest.h>

#include "cgmcts/adapter.hpp"
#include "cgmcts/errors.hpp"
#include "support.hpp"

// after Eigen: resolv.h defines _res
#include <httplib.h>

using namespace cgmcts;
using namespace testing_support;

namespace {

const OperatorRegistry kReg = OperatorRegistry::baseline();

WorkflowProgram sample() {
    return program({input(0), input(1), op(2, "add")}, {{0, 2, 0}, {1, 2, 1}}, 2);
}

ProblemSet sample_problems() {
    ProblemSet set;
    set.problems.push_back(Problem{{{0, 1.0}, {1, 2.0}}, 3.0, "c", {}});
    set.problems.push_back(Problem{{{0, 4.0}, {1, 2.0}}, 5.0, "c", {}});
    return set;
}

void expect_same_as_local(Proposer& remote_p, Evaluator& remote_e) {
    SyntheticProposer local_p(kReg);
    SyntheticEvaluator local_e(kReg);
    auto a = remote_p.propose(sample(), 5, 9);
    auto b = local_p.propose(sample(), 5, 9);
    ASSERT_EQ(a.candidates.size(), b.candidates.size());
    for (std::size_t i = 0; i < a.candidates.size(); ++i) EXPECT_EQ(a.candidates[i], b.candidates[i]);
    EXPECT_EQ(a.usage.prompt_tokens, b.usage.prompt_tokens);
    EXPECT_EQ(a.usage.role, Role::optimizer);

    auto x = remote_e.evaluate(sample(), sample_problems());
    auto y = local_e.evaluate(sample(), sample_problems());
    EXPECT_EQ(x.reward, y.reward);
    EXPECT_EQ(x.reward, 0.5);
    ASSERT_EQ(x.traces.size(), 2u);
    EXPECT_EQ(x.traces[1].intermediates, y.traces[1].intermediates);
    EXPECT_EQ(x.usage.completion_tokens, y.usage.completion_tokens);
}

}  // namespace

TEST(Adapter, TraceJsonRoundTrip) {
    ExecutionTrace t;
    t.intermediates = {1.5, -2};
    t.inputs = {3};
    t.success = false;
    t.failed_node = 4;
    t.failure = "division by zero";
    auto back = trace_from_json(trace_to_json(t));
    EXPECT_EQ(back.intermediates, t.intermediates);
    EXPECT_EQ(back.failed_node, t.failed_node);
    EXPECT_FALSE(back.output);
}

TEST(Adapter, HandleRequestErrors) {
    SyntheticProposer p(kReg);
    SyntheticEvaluator e(kReg);
    auto reply = handle_request(nlohmann::json{{"kind", "dance"}, {"program", program_to_json(sample())},
                                               {"params", nlohmann::json::object()}},
                                p, e);
    EXPECT_TRUE(reply.contains("error"));
    EXPECT_TRUE(handle_request(nlohmann::json::object(), p, e).contains("error"));
}

TEST(Adapter, AddressParsing) {
    EXPECT_THROW(make_transport("ftp://x"), ConfigError);
    EXPECT_THROW(make_transport("exec:"), ConfigError);
    EXPECT_THROW(HttpTransport("http://:80"), ConfigError);
}

TEST(Adapter, Http) {
    SyntheticProposer p(kReg);
    SyntheticEvaluator e(kReg);
    httplib::Server server;
    server.Post("/rpc", [&](const httplib::Request& req, httplib::Response& res) {
        res.set_content(handle_request(nlohmann::json::parse(req.body), p, e).dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    auto transport = make_transport("http://127.0.0.1:" + std::to_string(port) + "/rpc");
    RemoteProposer rp(transport);
    RemoteEvaluator re(transport);
    expect_same_as_local(rp, re);

    server.stop();
    th.join();
}

TEST(Adapter, HttpUnreachable) {
    RemoteEvaluator re(make_transport("http://127.0.0.1:1/rpc"));
    EXPECT_THROW(re.evaluate(sample(), sample_problems()), AdapterError);
}

TEST(Adapter, Stdio) {
    auto transport = make_transport(std::string("exec:") + CGMCTS_CLI_PATH + " serve");
    RemoteProposer rp(transport);
    RemoteEvaluator re(transport);
    expect_same_as_local(rp, re);
}

TEST(Adapter, StdioDeadChild) {
    auto transport = make_transport("exec:true");
    RemoteProposer rp(transport);
    EXPECT_THROW(rp.propose(sample(), 3, 1), AdapterError);
}
