#pragma once

#include "qoptics5/config.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qoptics5 {

const char* version();

/// Every scenario name accepted by run_scenario.
const std::vector<std::string>& scenario_names();

/// The complete schema: [run], [units] and one section per scenario.
Config make_config();

struct ScenarioOutput {
  std::string scenario;
  /// (file name, contents) in emission order; contents are byte-deterministic.
  std::vector<std::pair<std::string, std::string>> files;
  /// (name, value) tolerances and summary numbers echoed into the manifest.
  std::vector<std::pair<std::string, std::string>> tolerances;
  std::vector<std::string> warnings;
};

/// Runs one scenario against a validated config. Numerical failures throw qoptics5::Error.
ScenarioOutput run_scenario(const std::string& scenario, const Config& cfg);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

/// Effective config followed by a passive [manifest] block with version, tolerances and
/// one hash per data file. The text is itself a valid config.
std::string manifest_text(const Config& cfg, const ScenarioOutput& out);

/// Writes every data file and manifest.ini into dir (created if needed).
void write_outputs(const std::string& dir, const Config& cfg, const ScenarioOutput& out);

struct RerunReport {
  std::string scenario;
  std::vector<std::string> mismatched;  ///< file names whose hash differs from the manifest
  std::vector<std::string> missing;     ///< files listed in the manifest but not produced
  bool ok() const { return mismatched.empty() && missing.empty(); }
};

/// Loads a manifest, re-runs its scenario, writes the outputs into dir and compares hashes.
RerunReport rerun_from_manifest(const std::string& manifest_path, const std::string& dir);

}  // namespace qoptics5
