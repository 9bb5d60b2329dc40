#include "cgmcts/run_log.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "cgmcts/errors.hpp"

namespace cgmcts {

using nlohmann::json;

namespace {

constexpr std::string_view kEventNames[] = {"started",   "selected",        "expanded", "pruned",
                                            "simulated", "weights_updated", "refined"};

json family_object(const FamilyArray& values) {
    json j = json::object();
    for (Family f : kAllFamilies) j[std::string(family_symbol(f))] = values(static_cast<int>(f));
    return j;
}

FamilyArray family_array(const json& j) {
    FamilyArray values;
    for (Family f : kAllFamilies) values(static_cast<int>(f)) = j.at(std::string(family_symbol(f))).get<double>();
    return values;
}

template <class T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> read_opt(const json& doc, const char* key) {
    if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
    return doc.at(key).get<T>();
}

}  // namespace

std::string_view event_name(EventKind kind) noexcept { return kEventNames[static_cast<int>(kind)]; }

std::optional<EventKind> parse_event(std::string_view name) noexcept {
    for (int i = 0; i < 7; ++i)
        if (kEventNames[i] == name) return static_cast<EventKind>(i);
    return std::nullopt;
}

std::string_view role_name(Role role) noexcept { return role == Role::optimizer ? "optimizer" : "executor"; }

json record_to_json(const LogRecord& r) {
    json j{{"round", r.round},
           {"event", std::string(event_name(r.event))},
           {"node_id", opt(r.node_id)},
           {"C_vector", r.c_vector ? family_object(r.c_vector->values) : json(nullptr)},
           {"C_total", opt(r.c_total)},
           {"tau", opt(r.tau)},
           {"reward", opt(r.reward)},
           {"tokens_in", opt(r.tokens_in)},
           {"tokens_out", opt(r.tokens_out)}};
    if (r.role) j["role"] = std::string(role_name(*r.role));
    if (r.request_id) j["request_id"] = *r.request_id;
    if (r.parent_id) j["parent_id"] = *r.parent_id;
    if (r.depth) j["depth"] = *r.depth;
    if (r.credit) j["credit"] = *r.credit;
    if (r.simulation) j["sim"] = *r.simulation;
    if (r.proposed) j["proposed"] = *r.proposed;
    if (r.kept) j["kept"] = *r.kept;
    if (r.fallback) j["fallback"] = *r.fallback;
    if (!r.reasons.empty()) j["reasons"] = r.reasons;
    if (r.weights) j["weights"] = family_object(*r.weights);
    if (r.correlations) j["corr"] = family_object(*r.correlations);
    if (r.motif_count) j["motif_count"] = *r.motif_count;
    if (r.category) j["category"] = *r.category;
    if (r.n_problems) j["n_problems"] = *r.n_problems;
    if (r.prices) {
        json p = json::object();
        for (const auto& [role, price] : *r.prices)
            p[std::string(role_name(role))] = {{"input", price.input}, {"output", price.output}};
        j["prices"] = std::move(p);
    }
    if (r.note) j["note"] = *r.note;
    return j;
}

LogRecord record_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("record is not a JSON object");
    LogRecord r;
    for (const auto& key : {"round", "event", "node_id", "C_vector", "C_total", "tau", "reward", "tokens_in",
                            "tokens_out"})
        if (!doc.contains(key)) throw ParseError(std::string("record missing '") + key + "'");
    try {
        r.round = doc.at("round").get<int>();
        auto ev = parse_event(doc.at("event").get<std::string>());
        if (!ev) throw ParseError("unknown event '" + doc.at("event").get<std::string>() + "'");
        r.event = *ev;
        r.node_id = read_opt<std::int64_t>(doc, "node_id");
        if (!doc.at("C_vector").is_null()) r.c_vector = ConstraintVector{family_array(doc.at("C_vector"))};
        r.c_total = read_opt<double>(doc, "C_total");
        r.tau = read_opt<double>(doc, "tau");
        r.reward = read_opt<double>(doc, "reward");
        r.tokens_in = read_opt<std::int64_t>(doc, "tokens_in");
        r.tokens_out = read_opt<std::int64_t>(doc, "tokens_out");
        if (auto role = read_opt<std::string>(doc, "role")) {
            if (*role == "optimizer") r.role = Role::optimizer;
            else if (*role == "executor") r.role = Role::executor;
            else throw ParseError("unknown role '" + *role + "'");
        }
        r.request_id = read_opt<std::string>(doc, "request_id");
        r.parent_id = read_opt<std::int64_t>(doc, "parent_id");
        r.depth = read_opt<std::int64_t>(doc, "depth");
        r.credit = read_opt<double>(doc, "credit");
        r.simulation = read_opt<std::int64_t>(doc, "sim");
        r.proposed = read_opt<std::int64_t>(doc, "proposed");
        r.kept = read_opt<std::int64_t>(doc, "kept");
        r.fallback = read_opt<bool>(doc, "fallback");
        if (doc.contains("reasons")) r.reasons = doc.at("reasons").get<std::vector<std::string>>();
        if (doc.contains("weights")) r.weights = family_array(doc.at("weights"));
        if (doc.contains("corr")) r.correlations = family_array(doc.at("corr"));
        r.motif_count = read_opt<std::int64_t>(doc, "motif_count");
        r.category = read_opt<std::string>(doc, "category");
        r.n_problems = read_opt<std::int64_t>(doc, "n_problems");
        if (doc.contains("prices")) {
            PriceMap prices;
            for (const auto& [name, p] : doc.at("prices").items()) {
                Role role = name == "optimizer" ? Role::optimizer : Role::executor;
                prices[role] = {p.at("input").get<double>(), p.at("output").get<double>()};
            }
            r.prices = std::move(prices);
        }
        r.note = read_opt<std::string>(doc, "note");
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
    return r;
}

std::string record_line(const LogRecord& record) { return record_to_json(record).dump(); }

void RunLog::append(LogRecord record) {
    if (sink_) sink_(record);
    records_.push_back(std::move(record));
}

void RunLog::write_ndjson(std::ostream& out) const {
    for (const auto& r : records_) out << record_line(r) << '\n';
}

RunLog RunLog::read_ndjson(std::istream& in, const std::string& source_name) {
    RunLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            log.records_.push_back(record_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            throw ParseError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return log;
}

RunLog RunLog::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open run log '" + path + "'");
    return read_ndjson(in, path);
}

void RunLog::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write run log '" + path + "'");
    write_ndjson(out);
}

}  // namespace cgmcts
