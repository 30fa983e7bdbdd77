#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aero_ftc/sim.hpp"

namespace aero_ftc {

/// Bad scenario or manifest document. key() is the dotted path of the
/// offending entry, e.g. "lqr.Q" or "faults[1].gamma".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what) : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Parses a JSON scenario document. Every key is optional, so "{}" yields the
/// default scenario; "preset" selects a built-in scenario to start from.
/// Unknown keys are rejected. The result is validated.
ScenarioConfig parse_scenario(std::string_view json_text, std::string_view default_name = "scenario");
ScenarioConfig load_scenario_file(const std::string& path);

/// A batch of named scenario files:
///   {"output_dir": "out", "seed": 3,
///    "scenarios": [{"name": "healthy", "config": "healthy.json"}, ...]}
/// Relative config paths are resolved against the manifest's directory.
struct RunManifest {
  struct Entry {
    std::string name;
    std::string config_path;
  };
  std::vector<Entry> scenarios;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
};

/// True when the document has a top-level "scenarios" key.
bool is_manifest_document(std::string_view json_text);
RunManifest parse_manifest(std::string_view json_text, const std::string& base_dir = ".");

std::string read_text_file(const std::string& path);

}  // namespace aero_ftc
