#pragma once

#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "cgmcts/harness.hpp"

namespace cgmcts {

/// Request/response channel carrying one JSON document per exchange.
class Transport {
public:
    virtual ~Transport() = default;
    virtual nlohmann::json exchange(const nlohmann::json& request) = 0;
};

/// Child process speaking newline-delimited JSON over its stdin/stdout.
class StdioTransport final : public Transport {
public:
    explicit StdioTransport(const std::string& command);
    ~StdioTransport() override;
    StdioTransport(const StdioTransport&) = delete;
    StdioTransport& operator=(const StdioTransport&) = delete;

    nlohmann::json exchange(const nlohmann::json& request) override;

private:
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    std::mutex mutex_;
};

/// JSON POSTed to http://host:port/path.
class HttpTransport final : public Transport {
public:
    explicit HttpTransport(const std::string& url);
    nlohmann::json exchange(const nlohmann::json& request) override;

private:
    std::string host_;
    int port_ = 80;
    std::string path_ = "/";
    std::mutex mutex_;
};

/// "exec:<command line>" or "http://host:port[/path]". Throws ConfigError otherwise.
std::shared_ptr<Transport> make_transport(const std::string& address);

class RemoteProposer final : public Proposer {
public:
    explicit RemoteProposer(std::shared_ptr<Transport> transport) : transport_(std::move(transport)) {}
    Proposal propose(const WorkflowProgram& program, std::size_t count, std::uint64_t seed) override;

private:
    std::shared_ptr<Transport> transport_;
};

class RemoteEvaluator final : public Evaluator {
public:
    explicit RemoteEvaluator(std::shared_ptr<Transport> transport) : transport_(std::move(transport)) {}
    Evaluation evaluate(const WorkflowProgram& program, const ProblemSet& problems) override;

private:
    std::shared_ptr<Transport> transport_;
};

// Wire format:
//   {"kind":"propose","program":{...},"params":{"count":n,"seed":s}}
//     -> {"candidates":[...],"usage":{"prompt_tokens":p,"completion_tokens":c}}
//   {"kind":"evaluate","program":{...},"params":{"problems":[...]}}
//     -> {"reward":r,"traces":[{intermediates,inputs,success,output,failed_node,failure}],"usage":{...}}
//   failures -> {"error":"message"}
nlohmann::json trace_to_json(const ExecutionTrace& trace);
ExecutionTrace trace_from_json(const nlohmann::json& doc);

/// Server side of the protocol, backed by local implementations.
nlohmann::json handle_request(const nlohmann::json& request, Proposer& proposer, Evaluator& evaluator);

}  // namespace cgmcts
