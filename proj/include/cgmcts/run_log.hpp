#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cgmcts/constraints.hpp"

namespace cgmcts {

enum class EventKind { started, selected, expanded, pruned, simulated, weights_updated, refined };

std::string_view event_name(EventKind kind) noexcept;
std::optional<EventKind> parse_event(std::string_view name) noexcept;

enum class Role { optimizer, executor };
std::string_view role_name(Role role) noexcept;

struct Price {
    double input = 0.0;   ///< per prompt token
    double output = 0.0;  ///< per completion token
};

using PriceMap = std::map<Role, Price>;

/// One NDJSON record. The core keys (round, event, node_id, C_vector, C_total, tau,
/// reward, tokens_in, tokens_out) are always written, as null when unset; the
/// remaining fields are written only when present.
struct LogRecord {
    int round = 0;
    EventKind event = EventKind::selected;
    std::optional<std::int64_t> node_id;
    std::optional<ConstraintVector> c_vector;
    std::optional<double> c_total;
    std::optional<double> tau;
    std::optional<double> reward;
    std::optional<std::int64_t> tokens_in;
    std::optional<std::int64_t> tokens_out;

    std::optional<Role> role;
    std::optional<std::string> request_id;
    std::optional<std::int64_t> parent_id;
    std::optional<std::int64_t> depth;
    std::optional<double> credit;              ///< value backpropagated
    std::optional<std::int64_t> simulation;    ///< cumulative simulation count
    std::optional<std::int64_t> proposed;
    std::optional<std::int64_t> kept;
    std::optional<bool> fallback;
    std::vector<std::string> reasons;          ///< dominant failing families of a pruned candidate
    std::optional<FamilyArray> weights;
    std::optional<FamilyArray> correlations;
    std::optional<std::int64_t> motif_count;
    std::optional<std::string> category;
    std::optional<std::int64_t> n_problems;
    std::optional<PriceMap> prices;
    std::optional<std::string> note;
};

nlohmann::json record_to_json(const LogRecord& record);
LogRecord record_from_json(const nlohmann::json& doc);

/// Append-only event log with an optional streaming sink.
class RunLog {
public:
    using Sink = std::function<void(const LogRecord&)>;

    void set_sink(Sink sink) { sink_ = std::move(sink); }
    void append(LogRecord record);

    [[nodiscard]] const std::vector<LogRecord>& records() const noexcept { return records_; }
    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }

    void write_ndjson(std::ostream& out) const;
    /// Throws ParseError naming the offending line.
    static RunLog read_ndjson(std::istream& in, const std::string& source_name = "<log>");
    static RunLog load(const std::string& path);
    void save(const std::string& path) const;

private:
    std::vector<LogRecord> records_;
    Sink sink_;
};

std::string record_line(const LogRecord& record);

}  // namespace cgmcts
