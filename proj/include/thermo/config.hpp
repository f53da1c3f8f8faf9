#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "thermo/experiments.hpp"

namespace thermo {

/// Parsed run configuration. The document is a flat JSON object; every key is
/// optional and unknown keys are rejected. See README for the key list.
struct RunConfig {
    SweepSpec spec;
    /// E0 values for an initial-energy scan (empty: plain sweep).
    std::vector<double> initial_energies;
    /// Effective configuration after defaults and overrides, as a flat object.
    nlohmann::json snapshot;
};

/// Names of all accepted keys.
const std::vector<std::string>& config_keys();

/// Parses and validates a configuration document. Errors name the offending
/// key. Throws ConfigError.
RunConfig parse_config(std::string_view text);
RunConfig parse_config_document(const nlohmann::json& doc);

/// Applies "key=value" overrides to a flat document. Values are parsed as
/// JSON when possible and kept as strings otherwise.
void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& assignments);

/// Reads a whole file; throws ConfigError when it cannot be opened.
std::string read_text_file(const std::string& path);

}  // namespace thermo
