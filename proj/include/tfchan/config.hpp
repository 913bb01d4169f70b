#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfchan/error.hpp"
#include "tfchan/grid.hpp"
#include "tfchan/ofdm.hpp"
#include "tfchan/psido.hpp"
#include "tfchan/reconstruction.hpp"

namespace tfchan {

/// Parse or validation failure tied to a config line (0 when the line is unknown).
class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class Command { synth_symbol, channel_matrix, reconstruct, uniqueness_svd, ofdm_demo, calibrate };
std::string to_string(Command c);
/// Throws ConfigError for an unknown name.
Command command_from_string(const std::string& s);

struct ScenarioConfig {
  Command command = Command::reconstruct;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;

  // [grid]; defaults depend on the command (see default_grid).
  std::size_t n = 256;
  double period = 16.0;

  // [window]: gaussian | basis
  WindowKind window = WindowKind::gaussian;

  // [lattice]; negative radii select the full periodic lattice.
  double a = 1.0, b = 1.0;
  long k1 = -1, k2 = -1;

  // [channel]
  ChannelKind channel = ChannelKind::bandlimited;
  cplx los_gain{1.0, 0.0};
  double random_scale = 0.3;
  Smoothness smoothness = Smoothness::smooth;
  std::optional<Box> band;
  std::vector<Scatterer> scatterers;

  // [pilots]
  long pilot_spacing = 4;

  // [noise]
  double snr_db = std::numeric_limits<double>::infinity();

  // [equalizer]
  EqualizerMode mode = EqualizerMode::full_solve;
  double tikhonov = 1e-10;

  // [reconstruction]
  BumpProfile profile = BumpProfile::quintic;
  long eps_steps = 2;
  double nonvanish_tol = 1e-6;
  std::uint64_t calibration_seed = 0;
};

/// Per-command grid and lattice defaults: ofdm-demo uses N = 1024, T = 32, K = (3, 3);
/// uniqueness-svd N = 256, T = 16, K = (6, 6); every other command N = 256, T = 16 and the full
/// lattice.
void apply_command_defaults(ScenarioConfig& cfg);

/// INI-style text: [section] headers, `key = value` lines, `#` comments. Unknown sections or
/// keys, duplicates, bad values and grid-misaligned a/b raise ConfigError with the line number.
/// Output dir falls back to $TFCHAN_OUTPUT_DIR, then ./tfchan_out.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// The fully resolved parameter set.
nlohmann::json to_json(const ScenarioConfig& cfg);

/// Pipeline parameters of an ofdm-demo scenario.
OfdmConfig ofdm_config(const ScenarioConfig& cfg);

}  // namespace tfchan
