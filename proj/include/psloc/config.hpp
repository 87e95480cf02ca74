#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "psloc/harness.hpp"

namespace psloc {

/// Reads a TOML or JSON experiment file; the format follows the extension
/// (.toml / .json), anything else is sniffed. Throws Config.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Parses TOML text into the equivalent JSON document.
nlohmann::json toml_to_json(const std::string& text);

/// Throws Config on missing, unknown or mistyped keys.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace psloc
