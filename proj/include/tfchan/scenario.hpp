#pragma once

#include <filesystem>

#include "json.hpp"
#include "tfchan/config.hpp"

namespace tfchan {

struct RunOptions {
  /// Write per-stage CSVs under <output_dir>/dump.
  bool dump = false;
};

/// Executes the scenario and writes <output_dir>/report.json (deterministic), timing.json and
/// the command's artifacts. Returns the report. Failures surface as StageError.
nlohmann::json run(const ScenarioConfig& cfg, const RunOptions& options = {});

/// The report without touching the filesystem.
nlohmann::json evaluate(const ScenarioConfig& cfg, const RunOptions& options = {});

}  // namespace tfchan
