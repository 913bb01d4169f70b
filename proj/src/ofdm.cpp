#include "tfchan/ofdm.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <random>
#include <sstream>

#include "tfchan/error.hpp"

namespace tfchan {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double mean_power(const std::vector<cplx>& v) {
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

bool in_alphabet(cplx z) {
  for (const auto& s : qpsk_alphabet()) {
    if (std::abs(z - s) < 1e-12) return true;
  }
  return false;
}

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

const std::vector<cplx>& qpsk_alphabet() {
  static const std::vector<cplx> alphabet = [] {
    const double s = 1.0 / std::sqrt(2.0);
    return std::vector<cplx>{{s, s}, {-s, s}, {-s, -s}, {s, -s}};
  }();
  return alphabet;
}

cplx slice_qpsk(cplx z) {
  const double s = 1.0 / std::sqrt(2.0);
  return {z.real() >= 0.0 ? s : -s, z.imag() >= 0.0 ? s : -s};
}

std::vector<cplx> random_qpsk(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, 3);
  std::vector<cplx> out(count);
  for (auto& z : out) z = qpsk_alphabet()[static_cast<std::size_t>(pick(rng))];
  return out;
}

TransmitFrame modulate(const std::vector<cplx>& data, const std::vector<bool>& pilot_mask,
                       const Window& g, const GaborLattice& lattice, bool enforce_alphabet) {
  if (data.size() != lattice.size() || pilot_mask.size() != lattice.size()) {
    throw GridMismatch("modulate: data and pilot mask must have one entry per lattice point");
  }
  if (g.signal.grid != lattice.grid()) throw GridMismatch("modulate: window grid differs");
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& p = lattice.points()[i];
    if (pilot_mask[i]) {
      if (std::abs(std::abs(data[i]) - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "modulate: pilot at (" << p.k << ", " << p.l << ") is not unit modulus";
        throw DomainError(msg.str());
      }
    } else if (enforce_alphabet && data[i] != cplx{} && !in_alphabet(data[i])) {
      std::ostringstream msg;
      msg << "modulate: symbol " << data[i] << " at (" << p.k << ", " << p.l
          << ") is outside the QPSK alphabet";
      throw DomainError(msg.str());
    }
  }
  const TimeGrid& grid = lattice.grid();
  const UnitRoots roots(grid.size());
  SampledSignal f(grid);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i] == cplx{}) continue;
    const auto s = lattice.shift(i);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const long off = grid.offset(k);
      f[k] += data[i] * roots(s.freq * off) * g.signal[grid.wrap(off - s.time)];
    }
  }
  return TransmitFrame{data, pilot_mask, std::move(f)};
}

SampledSignal unit_noise(const TimeGrid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  SampledSignal w(grid);
  for (auto& z : w.values) z = {normal(rng), normal(rng)};
  const double p = mean_power(w.values);
  for (auto& z : w.values) z /= std::sqrt(p);
  return w;
}

Transmission transmit(const SampledSignal& f, const KNOperator& op, double snr_db,
                      const SampledSignal& noise) {
  Transmission out{apply_spreading(op, f)};
  if (std::isinf(snr_db) && snr_db > 0.0) return out;
  if (std::isnan(snr_db)) throw DomainError("transmit: snr_db is NaN");
  if (noise.grid != f.grid) throw GridMismatch("transmit: noise grid differs");
  const double ps = mean_power(out.received.values);
  const double pw = mean_power(noise.values);
  if (!(ps > 0.0)) return out;
  if (!(pw > 0.0)) throw DomainError("transmit: noise realization is zero");
  const double scale = std::sqrt(ps / pw * std::pow(10.0, -snr_db / 10.0));
  std::vector<cplx> added(noise.size());
  for (std::size_t k = 0; k < noise.size(); ++k) {
    added[k] = scale * noise[k];
    out.received[k] += added[k];
  }
  out.measured_snr_db = 10.0 * std::log10(ps / mean_power(added));
  return out;
}

Transmission transmit(const SampledSignal& f, const KNOperator& op, double snr_db,
                      std::uint64_t noise_seed) {
  return transmit(f, op, snr_db, unit_noise(f.grid, noise_seed));
}

std::vector<cplx> demodulate(const SampledSignal& f, const Window& g, const GaborLattice& lattice) {
  if (f.grid != lattice.grid()) throw GridMismatch("demodulate: signal grid differs");
  const TimeGrid& grid = lattice.grid();
  const UnitRoots roots(grid.size());
  std::vector<cplx> y(lattice.size());
#pragma omp parallel for schedule(static)
  for (long ii = 0; ii < static_cast<long>(lattice.size()); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    const auto s = lattice.shift(i);
    cplx acc{};
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const long off = grid.offset(k);
      acc += f[k] * std::conj(roots(s.freq * off) * g.signal[grid.wrap(off - s.time)]);
    }
    y[i] = grid.step() * acc;
  }
  return y;
}

PilotEstimate estimate_diagonal_from_pilots(const std::vector<cplx>& y, const TransmitFrame& frame,
                                            const Window& g, const GaborLattice& lattice) {
  if (y.size() != frame.data.size()) throw GridMismatch("estimate: y and frame sizes differ");
  PilotEstimate est;
  for (std::size_t i = 0; i < frame.pilot_mask.size(); ++i) {
    if (frame.pilot_mask[i]) est.pilot_indices.push_back(i);
  }
  if (est.pilot_indices.empty()) throw DomainError("estimate: frame carries no pilots");
  const auto gram = channel_matrix(identity_operator(lattice.grid()), g, lattice).entries;
  for (const auto i : est.pilot_indices) {
    const cplx c = frame.data[i];
    if (c == cplx{}) throw DomainError("estimate: pilot value is zero");
    const cplx d = y[i] / c;
    double leak = 0.0;
    for (std::size_t j = 0; j < frame.data.size(); ++j) {
      if (j == i) continue;
      leak += std::abs(gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) *
              std::abs(frame.data[j]);
    }
    est.diag_est.push_back(d);
    // H is locally (H_ll / |g|^2) Gram, so |d - H_ll| <= r |H_ll| and |H_ll| <= |d| / (1 - r)
    const double gg = std::abs(gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
    const double r = leak / (gg * std::abs(c));
    est.leakage_bound.push_back(r < 1.0 ? r * std::abs(d) / (1.0 - r)
                                        : std::numeric_limits<double>::infinity());
  }
  return est;
}

std::string to_string(EqualizerMode m) {
  return m == EqualizerMode::full_solve ? "full_solve" : "diagonal_only";
}

EqualizerMode equalizer_mode_from_string(const std::string& s) {
  if (s == "full_solve") return EqualizerMode::full_solve;
  if (s == "diagonal_only") return EqualizerMode::diagonal_only;
  throw DomainError("unknown equalizer mode '" + s + "'");
}

Equalized equalize(const std::vector<cplx>& y, const Eigen::MatrixXcd& h, EqualizerMode mode,
                   double tikhonov) {
  const Eigen::Index m = h.rows();
  if (h.cols() != m || static_cast<Eigen::Index>(y.size()) != m) {
    throw GridMismatch("equalize: H must be square and match y");
  }
  Equalized out;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  const double smin = s.size() ? s(s.size() - 1) : 0.0;
  out.condition_number = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  out.raw.resize(y.size());
  if (mode == EqualizerMode::diagonal_only) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (h(i, i) == cplx{}) {
        throw DomainError("equalize: zero diagonal entry at row " + std::to_string(i));
      }
      out.raw[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] / h(i, i);
    }
  } else {
    if (!(smin > tikhonov * smax)) {
      std::ostringstream msg;
      msg << "equalize: system singular to tolerance, condition number " << out.condition_number;
      throw DomainError(msg.str());
    }
    Eigen::MatrixXcd stacked(2 * m, m);
    stacked.topRows(m) = h;
    stacked.bottomRows(m) = (tikhonov * smax) * Eigen::MatrixXcd::Identity(m, m);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(2 * m);
    for (Eigen::Index i = 0; i < m; ++i) rhs(i) = y[static_cast<std::size_t>(i)];
    const Eigen::VectorXcd c = stacked.householderQr().solve(rhs);
    for (Eigen::Index i = 0; i < m; ++i) out.raw[static_cast<std::size_t>(i)] = c(i);
  }
  out.decisions.reserve(out.raw.size());
  for (const auto& z : out.raw) out.decisions.push_back(slice_qpsk(z));
  return out;
}

std::string to_string(ChannelKind k) {
  switch (k) {
    case ChannelKind::identity: return "identity";
    case ChannelKind::bandlimited: return "bandlimited";
    case ChannelKind::scatterers: return "scatterers";
  }
  return "identity";
}

ChannelKind channel_kind_from_string(const std::string& s) {
  if (s == "identity") return ChannelKind::identity;
  if (s == "bandlimited") return ChannelKind::bandlimited;
  if (s == "scatterers") return ChannelKind::scatterers;
  throw DomainError("unknown channel kind '" + s + "'");
}

KNOperator identity_operator(const TimeGrid& grid) {
  const PlaneGrid plane = spreading_plane(grid);
  SampledSymbol sp(plane, SymbolDomain::spreading);
  sp.at(plane.axis1.size() / 2, plane.axis2.size() / 2) = 1.0 / plane.cell();
  return KNOperator::from_spreading(std::move(sp), Box{0.0, 0.0});
}

namespace {

struct PilotSetup {
  GaborLattice lattice;
  BumpFunction bump;
};

PilotSetup pilot_setup(const OfdmConfig& cfg, const TimeGrid& grid) {
  const double p = static_cast<double>(cfg.pilot_spacing);
  if (cfg.pilot_spacing < 1) throw DomainError("pilot_spacing must be >= 1");
  auto lattice = build_full_lattice(grid, p * cfg.a, p * cfg.b);
  const Box outer = lattice.nyquist_box();
  const PlaneGrid plane = spreading_plane(grid);
  const double e = static_cast<double>(cfg.eps_steps);
  const Box inner{outer.half1 - e * plane.axis1.step(), outer.half2 - e * plane.axis2.step()};
  auto bump = build_bump(plane, inner, outer, cfg.profile);
  return {std::move(lattice), std::move(bump)};
}

Window make_window(const OfdmConfig& cfg, const TimeGrid& grid) {
  switch (cfg.window) {
    case WindowKind::gaussian: return gaussian_window(grid);
    case WindowKind::rectangular: return basis_window(grid, cfg.a);
    default: throw DomainError("ofdm: window must be gaussian or rectangular (basis)");
  }
}

}  // namespace

KNOperator build_channel(const OfdmConfig& cfg) {
  const TimeGrid grid(cfg.n, cfg.period);
  switch (cfg.channel) {
    case ChannelKind::identity: return identity_operator(grid);
    case ChannelKind::scatterers: return KNOperator::from_scatterers(grid, cfg.scatterers);
    case ChannelKind::bandlimited: break;
  }
  const Box band = cfg.channel_band ? *cfg.channel_band : pilot_setup(cfg, grid).bump.inner;
  const auto random = synth_bandlimited(grid, band, mix_seed(cfg.seed, 1), cfg.smoothness);
  return identity_operator(grid).combine(cfg.los_gain, random, cfg.random_scale);
}

ReceiveReport run_pipeline(const OfdmConfig& cfg) {
  const TimeGrid grid = stage("grid", [&] { return TimeGrid(cfg.n, cfg.period); });
  const Window g = stage("window", [&] { return make_window(cfg, grid); });
  const auto data_lattice =
      stage("lattice", [&] { return build_lattice(grid, cfg.a, cfg.b, cfg.k1, cfg.k2); });
  const auto setup = stage("pilots", [&] { return pilot_setup(cfg, grid); });
  const auto channel = stage("channel", [&] { return build_channel(cfg); });

  // One unit noise realization per frame, scaled to every SNR.
  const auto train_noise = unit_noise(grid, mix_seed(cfg.seed, 2));
  const auto data_noise = unit_noise(grid, mix_seed(cfg.seed, 3));

  const auto training = stage("modulate", [&] {
    const std::size_t np = setup.lattice.size();
    return modulate(std::vector<cplx>(np, cfg.pilot_value), std::vector<bool>(np, true), g,
                    setup.lattice);
  });
  const auto pilots = stage("estimate", [&] {
    const auto rx = transmit(training.signal, channel, cfg.snr_db, train_noise);
    const auto y = demodulate(rx.received, g, setup.lattice);
    return estimate_diagonal_from_pilots(y, training, g, setup.lattice);
  });

  const auto kernel = stage("reconstruct", [&] {
    auto k = build_kernel(g, setup.lattice, setup.bump);
    return calibrate(k, setup.lattice, g, mix_seed(cfg.seed, 4)).kernel;
  });
  const auto estimated = stage("reconstruct", [&] {
    auto sp = reconstruct_spreading(pilots.diag_est, setup.lattice, kernel,
                                    *kernel.calibration_constant);
    return KNOperator::from_spreading(std::move(sp), setup.bump.outer);
  });
  auto h_est = stage("channel_matrix", [&] { return channel_matrix(estimated, g, data_lattice); });
  auto h_true = stage("channel_matrix", [&] { return channel_matrix(channel, g, data_lattice); });

  const auto data = random_qpsk(data_lattice.size(), mix_seed(cfg.seed, 0));
  const auto payload = stage("modulate", [&] {
    return modulate(data, std::vector<bool>(data.size(), false), g, data_lattice);
  });
  const auto rx = stage("transmit", [&] { return transmit(payload.signal, channel, cfg.snr_db, data_noise); });
  auto y = stage("demodulate", [&] { return demodulate(rx.received, g, data_lattice); });
  const auto eq = stage("equalize", [&] { return equalize(y, h_est.entries, cfg.mode, cfg.tikhonov); });

  ReceiveReport r{data,           std::move(y),     std::move(h_est), std::move(h_true),
                  eq.raw,         eq.decisions,     pilots,           payload.signal,
                  rx.received};
  std::size_t errors = 0;
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (std::abs(r.decisions[i] - data[i]) > 1e-12) ++errors;
    err += std::norm(r.c_est[i] - data[i]);
    ref += std::norm(data[i]);
  }
  r.sER = static_cast<double>(errors) / static_cast<double>(data.size());
  r.evm = std::sqrt(err / ref);
  r.evm_db = r.evm > 0.0 ? 20.0 * std::log10(r.evm) : -std::numeric_limits<double>::infinity();
  r.condition_number = eq.condition_number;
  r.snr_db = cfg.snr_db;
  r.measured_snr_db = rx.measured_snr_db;
  r.h_est_relative_error = (r.H_est.entries - r.H_true.entries).norm() / r.H_true.entries.norm();
  r.calibration_constant = kernel.calibration_constant->real();
  r.band_violation = band_violation(channel, setup.bump.inner);
  return r;
}

nlohmann::json to_json(const ReceiveReport& r) {
  const auto finite_or_null = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
  };
  const auto complex_list = [](const std::vector<cplx>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& z : v) a.push_back({z.real(), z.imag()});
    return a;
  };
  nlohmann::json j;
  j["sER"] = r.sER;
  j["evm"] = r.evm;
  j["evm_db"] = finite_or_null(r.evm_db);
  j["condition_number"] = finite_or_null(r.condition_number);
  j["snr_db"] = finite_or_null(r.snr_db);
  j["measured_snr_db"] = finite_or_null(r.measured_snr_db);
  j["h_est_relative_error"] = r.h_est_relative_error;
  j["calibration_constant"] = r.calibration_constant;
  j["band_violation"] = r.band_violation;
  j["data_points"] = r.data.size();
  j["pilot_points"] = r.pilots.pilot_indices.size();
  double leak = 0.0;
  for (const auto v : r.pilots.leakage_bound) leak = std::max(leak, v);
  j["max_pilot_leakage_bound"] = finite_or_null(leak);
  j["y"] = complex_list(r.y);
  j["c_est"] = complex_list(r.c_est);
  return j;
}

}  // namespace tfchan
