#include "cgmcts/adapter.hpp"

#include <csignal>
#include <cerrno>
#include <cstring>

#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>

#include "cgmcts/errors.hpp"

namespace cgmcts {

using nlohmann::json;

// ---------------------------------------------------------------------------
// stdio

StdioTransport::StdioTransport(const std::string& command) {
    int in_pipe[2];
    int out_pipe[2];
    if (pipe(in_pipe) != 0) throw AdapterError(std::string("pipe: ") + std::strerror(errno));
    if (pipe(out_pipe) != 0) {
        close(in_pipe[0]);
        close(in_pipe[1]);
        throw AdapterError(std::string("pipe: ") + std::strerror(errno));
    }
    std::signal(SIGPIPE, SIG_IGN);
    pid_ = fork();
    if (pid_ < 0) throw AdapterError(std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

StdioTransport::~StdioTransport() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    if (pid_ > 0) {
        int status = 0;
        waitpid(pid_, &status, 0);
    }
}

json StdioTransport::exchange(const json& request) {
    std::lock_guard lock(mutex_);
    std::string line = request.dump() + "\n";
    std::size_t written = 0;
    while (written < line.size()) {
        ssize_t n = write(to_child_, line.data() + written, line.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw AdapterError(std::string("write to adapter: ") + std::strerror(errno));
        }
        written += static_cast<std::size_t>(n);
    }
    std::size_t newline;
    while ((newline = buffer_.find('\n')) == std::string::npos) {
        char chunk[4096];
        ssize_t n = read(from_child_, chunk, sizeof chunk);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) throw AdapterError("adapter closed its output");
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
    std::string reply = buffer_.substr(0, newline);
    buffer_.erase(0, newline + 1);
    try {
        return json::parse(reply);
    } catch (const json::exception& e) {
        throw AdapterError(std::string("malformed adapter reply: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// http

HttpTransport::HttpTransport(const std::string& url) {
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0) throw ConfigError("expected http:// address, got '" + url + "'");
    std::string rest = url.substr(scheme.size());
    auto slash = rest.find('/');
    if (slash != std::string::npos) {
        path_ = rest.substr(slash);
        rest = rest.substr(0, slash);
    }
    auto colon = rest.rfind(':');
    if (colon != std::string::npos) {
        try {
            port_ = std::stoi(rest.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("bad port in '" + url + "'");
        }
        rest = rest.substr(0, colon);
    }
    if (rest.empty()) throw ConfigError("missing host in '" + url + "'");
    host_ = rest;
}

json HttpTransport::exchange(const json& request) {
    std::lock_guard lock(mutex_);
    httplib::Client client(host_, port_);
    client.set_read_timeout(120, 0);
    auto res = client.Post(path_, request.dump(), "application/json");
    if (!res) throw AdapterError("http request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw AdapterError("http status " + std::to_string(res->status));
    try {
        return json::parse(res->body);
    } catch (const json::exception& e) {
        throw AdapterError(std::string("malformed adapter reply: ") + e.what());
    }
}

std::shared_ptr<Transport> make_transport(const std::string& address) {
    if (address.rfind("exec:", 0) == 0) {
        auto command = address.substr(5);
        if (command.empty()) throw ConfigError("empty exec: command");
        return std::make_shared<StdioTransport>(command);
    }
    if (address.rfind("http://", 0) == 0) return std::make_shared<HttpTransport>(address);
    throw ConfigError("unknown adapter address '" + address + "'");
}

// ---------------------------------------------------------------------------
// wire format

json trace_to_json(const ExecutionTrace& trace) {
    json doc{{"intermediates", trace.intermediates}, {"inputs", trace.inputs}, {"success", trace.success}};
    doc["output"] = trace.output ? json(*trace.output) : json(nullptr);
    doc["failed_node"] = trace.failed_node ? json(*trace.failed_node) : json(nullptr);
    doc["failure"] = trace.failure;
    return doc;
}

ExecutionTrace trace_from_json(const json& doc) {
    ExecutionTrace t;
    t.intermediates = doc.at("intermediates").get<std::vector<double>>();
    t.inputs = doc.at("inputs").get<std::vector<double>>();
    t.success = doc.at("success").get<bool>();
    if (doc.contains("output") && !doc["output"].is_null()) t.output = doc["output"].get<double>();
    if (doc.contains("failed_node") && !doc["failed_node"].is_null()) t.failed_node = doc["failed_node"].get<NodeId>();
    t.failure = doc.value("failure", std::string());
    return t;
}

namespace {

json usage_json(const TokenRecord& usage) {
    return {{"prompt_tokens", usage.prompt_tokens}, {"completion_tokens", usage.completion_tokens}};
}

TokenRecord usage_from(const json& reply, Role role) {
    TokenRecord r;
    r.role = role;
    if (reply.contains("usage")) {
        r.prompt_tokens = reply["usage"].value("prompt_tokens", std::int64_t{0});
        r.completion_tokens = reply["usage"].value("completion_tokens", std::int64_t{0});
        r.request_id = reply["usage"].value("request_id", std::string());
    }
    return r;
}

json checked(json reply) {
    if (reply.contains("error")) throw AdapterError("adapter error: " + reply["error"].dump());
    return reply;
}

}  // namespace

Proposal RemoteProposer::propose(const WorkflowProgram& program, std::size_t count, std::uint64_t seed) {
    json request{{"kind", "propose"}, {"program", program_to_json(program)},
                 {"params", {{"count", count}, {"seed", seed}}}};
    json reply = checked(transport_->exchange(request));
    Proposal p;
    try {
        for (const auto& c : reply.at("candidates")) p.candidates.push_back(program_from_json(c));
    } catch (const json::exception& e) {
        throw AdapterError(std::string("bad propose reply: ") + e.what());
    }
    if (p.candidates.size() > count) p.candidates.resize(count);
    p.usage = usage_from(reply, Role::optimizer);
    return p;
}

Evaluation RemoteEvaluator::evaluate(const WorkflowProgram& program, const ProblemSet& problems) {
    if (problems.empty()) throw InputError("evaluate: empty problem set");
    json request{{"kind", "evaluate"}, {"program", program_to_json(program)},
                 {"params", {{"problems", problems_to_json(problems.problems)["problems"]}}}};
    json reply = checked(transport_->exchange(request));
    Evaluation e;
    try {
        e.reward = reply.at("reward").get<double>();
        for (const auto& t : reply.value("traces", json::array())) e.traces.push_back(trace_from_json(t));
    } catch (const json::exception& ex) {
        throw AdapterError(std::string("bad evaluate reply: ") + ex.what());
    }
    if (!(e.reward >= 0.0 && e.reward <= 1.0)) throw AdapterError("reward outside [0, 1]");
    e.usage = usage_from(reply, Role::executor);
    return e;
}

json handle_request(const json& request, Proposer& proposer, Evaluator& evaluator) {
    try {
        const auto kind = request.at("kind").get<std::string>();
        const auto program = program_from_json(request.at("program"));
        const auto& params = request.at("params");
        if (kind == "propose") {
            auto p = proposer.propose(program, params.at("count").get<std::size_t>(),
                                      params.value("seed", std::uint64_t{0}));
            json candidates = json::array();
            for (const auto& c : p.candidates) candidates.push_back(program_to_json(c));
            return {{"candidates", candidates}, {"usage", usage_json(p.usage)}};
        }
        if (kind == "evaluate") {
            auto split = problems_from_json(json{{"problems", params.at("problems")}, {"split_ratio", {1, 0}}});
            ProblemSet all = split.validation;
            for (auto& p : split.test.problems) all.problems.push_back(std::move(p));
            auto e = evaluator.evaluate(program, all);
            json traces = json::array();
            for (const auto& t : e.traces) traces.push_back(trace_to_json(t));
            return {{"reward", e.reward}, {"traces", traces}, {"usage", usage_json(e.usage)}};
        }
        return {{"error", "unknown kind '" + kind + "'"}};
    } catch (const std::exception& e) {
        return {{"error", e.what()}};
    }
}

}  // namespace cgmcts
