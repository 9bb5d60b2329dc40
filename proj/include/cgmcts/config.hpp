#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "cgmcts/harness.hpp"
#include "cgmcts/motifs.hpp"
#include "cgmcts/search.hpp"
#include "cgmcts/suite.hpp"

namespace cgmcts {

/// Everything a run needs. Defaults reproduce the reference constants with seed 42.
struct RunConfig {
    SearchSettings search;
    MotifParams motifs;
    std::size_t templates_per_category = 12;
    PriceMap prices{{Role::optimizer, {}}, {Role::executor, {}}};
    std::string executor = "synthetic";  ///< or "external:<address>"

    std::size_t problem_count = 20;
    std::size_t category_count = 1;
    SuiteOptions suite;
    Tolerance tolerance;
    std::optional<std::string> problem_file;     ///< replaces the synthetic suite
    std::optional<std::string> initial_program;  ///< required with problem_file

    [[nodiscard]] std::uint64_t seed() const noexcept { return search.budget.seed; }
};

/// Parses a config document on top of the defaults. Unknown keys and invalid values throw ConfigError.
RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::string& path);

/// Throws ConfigError describing the first broken invariant.
void validate_config(const RunConfig& config);

}  // namespace cgmcts
