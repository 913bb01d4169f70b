#include "tfchan/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace tfchan {

namespace {

struct Entry {
  std::string value;
  std::size_t line;
};

using Table = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"scenario", {"command", "seed", "output_dir"}},
      {"grid", {"n", "period"}},
      {"window", {"kind"}},
      {"lattice", {"a", "b", "k1", "k2"}},
      {"channel",
       {"kind", "los_gain", "random_scale", "smoothness", "band_eta", "band_u", "scatterers"}},
      {"pilots", {"spacing"}},
      {"noise", {"snr_db"}},
      {"equalizer", {"mode", "tikhonov"}},
      {"reconstruction", {"profile", "eps_steps", "nonvanish_tol", "calibration_seed"}},
  };
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Table tokenize(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string raw, section;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "malformed section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (!schema().count(section)) throw ConfigError(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (section.empty()) throw ConfigError(line, "key '" + key + "' outside any section");
    if (!schema().at(section).count(key)) {
      throw ConfigError(line, "unknown key '" + key + "' in [" + section + "]");
    }
    const std::string full = section + "." + key;
    if (auto it = table.find(full); it != table.end()) {
      throw ConfigError(line, "duplicate key '" + full + "' (first set on line " +
                                  std::to_string(it->second.line) + ")");
    }
    if (value.empty()) throw ConfigError(line, "empty value for '" + full + "'");
    table[full] = {value, line};
  }
  return table;
}

double to_double(const std::string& key, const Entry& e) {
  if (e.value == "inf" || e.value == "+inf") return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != e.value.size() || !std::isfinite(v)) {
    throw ConfigError(e.line, "'" + key + "' expects a number, got '" + e.value + "'");
  }
  return v;
}

long to_long(const std::string& key, const Entry& e) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(e.value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != e.value.size()) {
    throw ConfigError(e.line, "'" + key + "' expects an integer, got '" + e.value + "'");
  }
  return v;
}

template <typename F>
auto to_enum(const std::string& key, const Entry& e, F&& parse) {
  try {
    return parse(e.value);
  } catch (const Error& err) {
    throw ConfigError(e.line, "'" + key + "': " + err.what());
  }
}

cplx to_complex(const std::string& key, const Entry& e) {
  std::istringstream in(e.value);
  double re = 0.0, im = 0.0;
  if (!(in >> re)) throw ConfigError(e.line, "'" + key + "' expects 're [im]'");
  if (!(in >> im)) im = 0.0;
  std::string rest;
  if (in >> rest) throw ConfigError(e.line, "'" + key + "' has trailing text '" + rest + "'");
  return {re, im};
}

std::vector<Scatterer> to_scatterers(const std::string& key, const Entry& e) {
  std::vector<Scatterer> out;
  std::istringstream list(e.value);
  std::string item;
  while (std::getline(list, item, ';')) {
    if (trim(item).empty()) continue;
    std::istringstream in(item);
    Scatterer s;
    double re = 0.0, im = 0.0;
    std::string rest;
    if (!(in >> re >> im >> s.eta >> s.u) || (in >> rest)) {
      throw ConfigError(e.line, "'" + key + "' expects 'amp_re amp_im eta u; ...', got '" +
                                    trim(item) + "'");
    }
    s.amplitude = {re, im};
    out.push_back(s);
  }
  if (out.empty()) throw ConfigError(e.line, "'" + key + "' lists no scatterer");
  return out;
}

// Positive multiple of `step` or a ConfigError naming the nearest valid value.
void require_aligned(const std::string& key, double value, double step, std::size_t line) {
  const double r = value / step;
  const double nearest = std::max(1.0, std::round(r)) * step;
  if (!(value > 0.0) || std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, std::abs(r))) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "'" << key << "' = " << value << " is not a positive multiple of the grid step "
        << step << "; nearest valid value is " << nearest;
    throw ConfigError(line, msg.str());
  }
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::synth_symbol: return "synth-symbol";
    case Command::channel_matrix: return "channel-matrix";
    case Command::reconstruct: return "reconstruct";
    case Command::uniqueness_svd: return "uniqueness-svd";
    case Command::ofdm_demo: return "ofdm-demo";
    case Command::calibrate: return "calibrate";
  }
  return "reconstruct";
}

Command command_from_string(const std::string& s) {
  for (const auto c : {Command::synth_symbol, Command::channel_matrix, Command::reconstruct,
                       Command::uniqueness_svd, Command::ofdm_demo, Command::calibrate}) {
    if (to_string(c) == s) return c;
  }
  throw ConfigError(0, "unknown command '" + s +
                           "' (expected synth-symbol, channel-matrix, reconstruct, "
                           "uniqueness-svd, ofdm-demo or calibrate)");
}

void apply_command_defaults(ScenarioConfig& cfg) {
  if (cfg.command == Command::ofdm_demo) {
    cfg.n = 1024;
    cfg.period = 32.0;
    cfg.k1 = cfg.k2 = 3;
    cfg.smoothness = Smoothness::white;
  } else {
    cfg.n = 256;
    cfg.period = 16.0;
    cfg.k1 = cfg.k2 = cfg.command == Command::uniqueness_svd ? 6 : -1;
    cfg.smoothness = Smoothness::smooth;
  }
}

ScenarioConfig parse_config(const std::string& text) {
  const Table t = tokenize(text);
  const auto get = [&](const char* key) -> const Entry* {
    auto it = t.find(key);
    return it == t.end() ? nullptr : &it->second;
  };

  ScenarioConfig cfg;
  const Entry* cmd = get("scenario.command");
  if (!cmd) throw ConfigError(0, "missing required key 'command' in [scenario]");
  try {
    cfg.command = command_from_string(cmd->value);
  } catch (const ConfigError& e) {
    throw ConfigError(cmd->line, e.what());
  }
  apply_command_defaults(cfg);

  if (auto e = get("scenario.seed")) {
    const long v = to_long("seed", *e);
    if (v < 0) throw ConfigError(e->line, "'seed' must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(v);
  }
  if (auto e = get("scenario.output_dir")) {
    cfg.output_dir = e->value;
  } else if (const char* env = std::getenv("TFCHAN_OUTPUT_DIR"); env && *env) {
    cfg.output_dir = env;
  } else {
    cfg.output_dir = "tfchan_out";
  }

  if (auto e = get("grid.n")) {
    const long v = to_long("n", *e);
    if (v < 4 || v % 2 != 0 || v > 8192) {
      throw ConfigError(e->line, "'n' must be even and in [4, 8192], got " + e->value);
    }
    cfg.n = static_cast<std::size_t>(v);
  }
  if (auto e = get("grid.period")) {
    cfg.period = to_double("period", *e);
    if (!(cfg.period > 0.0)) throw ConfigError(e->line, "'period' must be positive");
  }
  const TimeGrid grid(cfg.n, cfg.period);

  if (auto e = get("window.kind")) {
    if (e->value == "gaussian") {
      cfg.window = WindowKind::gaussian;
    } else if (e->value == "basis") {
      cfg.window = WindowKind::rectangular;
    } else {
      throw ConfigError(e->line, "'kind' must be gaussian or basis, got '" + e->value + "'");
    }
  }

  if (auto e = get("lattice.a")) cfg.a = to_double("a", *e);
  if (auto e = get("lattice.b")) cfg.b = to_double("b", *e);
  const Entry* ea = get("lattice.a");
  const Entry* eb = get("lattice.b");
  require_aligned("a", cfg.a, grid.step(), ea ? ea->line : 0);
  require_aligned("b", cfg.b, grid.dual_step(), eb ? eb->line : 0);
  if (auto e = get("lattice.k1")) cfg.k1 = to_long("k1", *e);
  if (auto e = get("lattice.k2")) cfg.k2 = to_long("k2", *e);
  if (cfg.window == WindowKind::rectangular && std::abs(cfg.a * cfg.b - 1.0) > 1e-9) {
    throw ConfigError(ea ? ea->line : 0, "the basis window needs ab = 1");
  }

  if (auto e = get("channel.kind")) cfg.channel = to_enum("kind", *e, channel_kind_from_string);
  if (auto e = get("channel.los_gain")) cfg.los_gain = to_complex("los_gain", *e);
  if (auto e = get("channel.random_scale")) {
    cfg.random_scale = to_double("random_scale", *e);
    if (cfg.random_scale < 0.0) throw ConfigError(e->line, "'random_scale' must be >= 0");
  }
  if (auto e = get("channel.smoothness")) {
    if (e->value == "white") {
      cfg.smoothness = Smoothness::white;
    } else if (e->value == "smooth") {
      cfg.smoothness = Smoothness::smooth;
    } else {
      throw ConfigError(e->line, "'smoothness' must be white or smooth");
    }
  }
  const Entry* be = get("channel.band_eta");
  const Entry* bu = get("channel.band_u");
  if ((be == nullptr) != (bu == nullptr)) {
    throw ConfigError((be ? be : bu)->line, "band_eta and band_u must be set together");
  }
  if (be) {
    cfg.band = Box{to_double("band_eta", *be), to_double("band_u", *bu)};
    if (cfg.band->half1 < 0.0 || cfg.band->half2 < 0.0) {
      throw ConfigError(be->line, "band half-widths must be >= 0");
    }
  }
  if (auto e = get("channel.scatterers")) {
    cfg.scatterers = to_scatterers("scatterers", *e);
    for (const auto& s : cfg.scatterers) {
      require_aligned("scatterer eta", std::abs(s.eta) > 0 ? std::abs(s.eta) : grid.dual_step(),
                      grid.dual_step(), e->line);
      require_aligned("scatterer u", std::abs(s.u) > 0 ? std::abs(s.u) : grid.step(), grid.step(),
                      e->line);
    }
  }
  if (cfg.channel == ChannelKind::scatterers && cfg.scatterers.empty()) {
    const Entry* k = get("channel.kind");
    throw ConfigError(k ? k->line : 0, "channel kind scatterers needs 'scatterers'");
  }

  if (auto e = get("pilots.spacing")) {
    cfg.pilot_spacing = to_long("spacing", *e);
    if (cfg.pilot_spacing < 1) throw ConfigError(e->line, "'spacing' must be >= 1");
  }
  if (auto e = get("noise.snr_db")) cfg.snr_db = to_double("snr_db", *e);
  if (auto e = get("equalizer.mode")) cfg.mode = to_enum("mode", *e, equalizer_mode_from_string);
  if (auto e = get("equalizer.tikhonov")) {
    cfg.tikhonov = to_double("tikhonov", *e);
    if (cfg.tikhonov < 0.0 || cfg.tikhonov >= 1.0) {
      throw ConfigError(e->line, "'tikhonov' must be in [0, 1)");
    }
  }
  if (auto e = get("reconstruction.profile")) {
    cfg.profile = to_enum("profile", *e, bump_profile_from_string);
  }
  if (auto e = get("reconstruction.eps_steps")) {
    cfg.eps_steps = to_long("eps_steps", *e);
    if (cfg.eps_steps < 0) throw ConfigError(e->line, "'eps_steps' must be >= 0");
  }
  if (cfg.profile != BumpProfile::indicator && cfg.eps_steps == 0) {
    const Entry* e = get("reconstruction.eps_steps");
    throw ConfigError(e ? e->line : 0, "a smooth bump needs eps_steps >= 1");
  }
  if (auto e = get("reconstruction.nonvanish_tol")) {
    cfg.nonvanish_tol = to_double("nonvanish_tol", *e);
    if (!(cfg.nonvanish_tol > 0.0)) throw ConfigError(e->line, "'nonvanish_tol' must be > 0");
  }
  if (auto e = get("reconstruction.calibration_seed")) {
    const long v = to_long("calibration_seed", *e);
    if (v < 0) throw ConfigError(e->line, "'calibration_seed' must be non-negative");
    cfg.calibration_seed = static_cast<std::uint64_t>(v);
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

nlohmann::json to_json(const ScenarioConfig& cfg) {
  const auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
  };
  nlohmann::json j;
  j["scenario"] = {{"command", to_string(cfg.command)},
                   {"seed", cfg.seed},
                   {"output_dir", cfg.output_dir.string()}};
  j["grid"] = {{"n", cfg.n}, {"period", cfg.period}};
  j["window"] = {{"kind", cfg.window == WindowKind::gaussian ? "gaussian" : "basis"}};
  j["lattice"] = {{"a", cfg.a}, {"b", cfg.b}, {"k1", cfg.k1}, {"k2", cfg.k2}};
  nlohmann::json ch = {{"kind", to_string(cfg.channel)},
                       {"los_gain", {cfg.los_gain.real(), cfg.los_gain.imag()}},
                       {"random_scale", cfg.random_scale},
                       {"smoothness", cfg.smoothness == Smoothness::white ? "white" : "smooth"}};
  if (cfg.band) {
    ch["band_eta"] = cfg.band->half1;
    ch["band_u"] = cfg.band->half2;
  } else {
    ch["band_eta"] = "auto";
    ch["band_u"] = "auto";
  }
  nlohmann::json sc = nlohmann::json::array();
  for (const auto& s : cfg.scatterers) {
    sc.push_back({s.amplitude.real(), s.amplitude.imag(), s.eta, s.u});
  }
  ch["scatterers"] = sc;
  j["channel"] = ch;
  j["pilots"] = {{"spacing", cfg.pilot_spacing}};
  j["noise"] = {{"snr_db", num(cfg.snr_db)}};
  j["equalizer"] = {{"mode", to_string(cfg.mode)}, {"tikhonov", cfg.tikhonov}};
  j["reconstruction"] = {{"profile", to_string(cfg.profile)},
                         {"eps_steps", cfg.eps_steps},
                         {"nonvanish_tol", cfg.nonvanish_tol},
                         {"calibration_seed", cfg.calibration_seed}};
  return j;
}

OfdmConfig ofdm_config(const ScenarioConfig& cfg) {
  OfdmConfig o;
  o.n = cfg.n;
  o.period = cfg.period;
  o.window = cfg.window;
  o.a = cfg.a;
  o.b = cfg.b;
  o.k1 = cfg.k1;
  o.k2 = cfg.k2;
  o.pilot_spacing = cfg.pilot_spacing;
  o.channel = cfg.channel;
  o.los_gain = cfg.los_gain;
  o.random_scale = cfg.random_scale;
  o.channel_band = cfg.band;
  o.smoothness = cfg.smoothness;
  o.scatterers = cfg.scatterers;
  o.snr_db = cfg.snr_db;
  o.mode = cfg.mode;
  o.tikhonov = cfg.tikhonov;
  o.profile = cfg.profile;
  o.eps_steps = cfg.eps_steps;
  o.seed = cfg.seed;
  return o;
}

}  // namespace tfchan
