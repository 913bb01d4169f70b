#include "tfchan/scenario.hpp"

#include <chrono>
#include <fstream>
#include <optional>

#include "tfchan/gabor.hpp"
#include "tfchan/ofdm.hpp"
#include "tfchan/reconstruction.hpp"
#include "tfchan/signal_io.hpp"
#include "tfchan/uniqueness.hpp"

namespace tfchan {

namespace {

namespace fs = std::filesystem;

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

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

struct Context {
  const ScenarioConfig& cfg;
  const RunOptions& options;
  std::optional<fs::path> out;
  nlohmann::json warnings = nlohmann::json::array();

  std::optional<fs::path> dump_dir() const {
    if (!out || !options.dump) return std::nullopt;
    fs::create_directories(*out / "dump");
    return *out / "dump";
  }
};

TimeGrid make_grid(const ScenarioConfig& cfg) { return TimeGrid(cfg.n, cfg.period); }

Window make_window(const ScenarioConfig& cfg, const TimeGrid& grid) {
  return cfg.window == WindowKind::gaussian ? gaussian_window(grid) : basis_window(grid, cfg.a);
}

// Q of the lattice shrunk by eps grid steps on each spreading axis.
Box q_eps(const ScenarioConfig& cfg, const GaborLattice& lattice) {
  const PlaneGrid plane = spreading_plane(lattice.grid());
  const Box q = lattice.nyquist_box();
  const double e = static_cast<double>(cfg.eps_steps);
  return {q.half1 - e * plane.axis1.step(), q.half2 - e * plane.axis2.step()};
}

KNOperator make_operator(const ScenarioConfig& cfg, const TimeGrid& grid, Box default_band) {
  switch (cfg.channel) {
    case ChannelKind::identity: return identity_operator(grid);
    case ChannelKind::scatterers: return KNOperator::from_scatterers(grid, cfg.scatterers);
    case ChannelKind::bandlimited: break;
  }
  const Box band = cfg.band.value_or(default_band);
  const auto random = synth_bandlimited(grid, band, cfg.seed, cfg.smoothness);
  return identity_operator(grid).combine(cfg.los_gain, random, cfg.random_scale);
}

nlohmann::json box_json(const Box& b) { return {b.half1, b.half2}; }

nlohmann::json synth_symbol(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const TimeGrid grid = make_grid(cfg);
  const auto lattice = stage("lattice", [&] { return build_lattice(grid, cfg.a, cfg.b, cfg.k1, cfg.k2); });
  const Box band = cfg.band.value_or(q_eps(cfg, lattice));
  const auto op = stage("synth", [&] { return make_operator(cfg, grid, band); });
  nlohmann::json r;
  r["band_box"] = box_json(band);
  r["band_violation"] = band_violation(op, band);
  if (op.has_samples()) {
    std::size_t points = 0;
    for (const auto& v : op.spreading().values) points += v != cplx{} ? 1 : 0;
    r["spreading_points"] = points;
    r["symbol_norm"] = op.symbol().norm();
    r["spreading_norm"] = op.spreading().norm();
    r["symbol_max_abs"] = max_abs(op.symbol().values);
  } else {
    r["spreading_points"] = op.exact_shifts().size();
  }
  if (ctx.out) stage("write", [&] { io::save_operator(op, *ctx.out / "operator"); return 0; });
  if (auto d = ctx.dump_dir(); d && op.has_samples()) {
    io::export_csv(op.spreading(), *d / "spreading.csv");
    io::export_slice_csv(op.symbol(), 0.0, *d / "symbol_slice.csv");
  }
  return r;
}

nlohmann::json channel_matrix_cmd(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const TimeGrid grid = make_grid(cfg);
  const Window g = stage("window", [&] { return make_window(cfg, grid); });
  const auto lattice = stage("lattice", [&] { return build_lattice(grid, cfg.a, cfg.b, cfg.k1, cfg.k2); });
  const auto op = stage("synth", [&] { return make_operator(cfg, grid, q_eps(cfg, lattice)); });
  const auto h = stage("channel_matrix", [&] { return channel_matrix(op, g, lattice); });
  const auto diag = h.diagonal();
  nlohmann::json r;
  r["lattice_points"] = lattice.size();
  r["frobenius_norm"] = h.entries.norm();
  const double offdiag = (h.entries - Eigen::MatrixXcd(h.entries.diagonal().asDiagonal())).norm();
  r["offdiag_energy_fraction"] = std::pow(offdiag / h.entries.norm(), 2);
  if (op.has_samples()) {
    const auto conv = stage("diagonal", [&] { return diag_via_convolution(op, g, lattice); });
    double dev = 0.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
      dev = std::max(dev, std::abs(diag[i] - conv[i]) / std::max(std::abs(conv[i]), 1e-300));
    }
    r["diag_max_relative_deviation"] = dev;
  } else {
    r["diag_max_relative_deviation"] = nullptr;
  }
  if (ctx.out) stage("write", [&] { io::save_channel_matrix(h, *ctx.out / "channel_matrix"); return 0; });
  if (auto d = ctx.dump_dir()) io::export_channel_csv(h, *d / "channel_matrix.csv");
  return r;
}

struct KernelSetup {
  GaborLattice lattice;
  ReconstructionKernel kernel;
};

KernelSetup calibrated_kernel(Context& ctx, const Window& g, const TimeGrid& grid) {
  const auto& cfg = ctx.cfg;
  auto lattice = stage("lattice", [&] { return build_lattice(grid, cfg.a, cfg.b, cfg.k1, cfg.k2); });
  auto kernel = stage("kernel", [&] {
    const Box q = lattice.nyquist_box();
    const Box inner = cfg.profile == BumpProfile::indicator && cfg.eps_steps == 0 ? q : q_eps(cfg, lattice);
    const auto bump = build_bump(spreading_plane(grid), inner, q, cfg.profile);
    if (!bump.smooth()) ctx.warnings.push_back("indicator bump: phi is not smooth");
    return build_kernel(g, lattice, bump, cfg.nonvanish_tol);
  });
  kernel = stage("calibrate", [&] { return calibrate(kernel, lattice, g, cfg.calibration_seed).kernel; });
  return {std::move(lattice), std::move(kernel)};
}

nlohmann::json reconstruct_cmd(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const TimeGrid grid = make_grid(cfg);
  const Window g = stage("window", [&] { return make_window(cfg, grid); });
  auto [lattice, kernel] = calibrated_kernel(ctx, g, grid);
  const auto op = stage("synth", [&] { return make_operator(cfg, grid, kernel.phi.inner); });
  const double violation = band_violation(op, kernel.phi.inner);
  if (violation > 1e-12) {
    ctx.warnings.push_back("spreading energy fraction " + std::to_string(violation) +
                           " lies outside the flat region of phi; reconstruction aliases");
  }
  const auto diag = stage("diagonal", [&] {
    return op.has_samples() ? diag_via_convolution(op, g, lattice) : diag_direct(op, g, lattice);
  });
  const auto freq = stage("reconstruct", [&] { return reconstruct_frequency(diag, lattice, kernel); });
  const auto time = stage("reconstruct", [&] { return reconstruct_time(diag, lattice, kernel); });
  const auto truth = op.symbol_samples();
  nlohmann::json r;
  r["lattice_points"] = lattice.size();
  r["covers_torus"] = lattice.covers_torus();
  r["bump_inner"] = box_json(kernel.phi.inner);
  r["bump_outer"] = box_json(kernel.phi.outer);
  r["min_abs_G"] = kernel.min_abs_G_on_support;
  r["min_abs_G_at"] = {kernel.min_eta, kernel.min_u};
  r["calibration_constant"] = kernel.calibration_constant->real();
  r["band_violation"] = violation;
  r["relative_error"] = relative_error(freq.values, truth.values);
  r["relative_error_time"] = relative_error(time.symbol.values, truth.values);
  r["route_agreement"] = relative_error(time.symbol.values, freq.values);
  r["truncation_tail"] = time.truncation_tail;
  if (ctx.out) stage("write", [&] { io::save(freq, *ctx.out / "symbol_reconstructed"); return 0; });
  if (auto d = ctx.dump_dir()) {
    io::export_slice_csv(truth, 0.0, *d / "symbol_truth_slice.csv");
    io::export_slice_csv(freq, 0.0, *d / "symbol_frequency_slice.csv");
    io::export_slice_csv(time.symbol, 0.0, *d / "symbol_time_slice.csv");
    std::ofstream csv(*d / "diagonal.csv");
    csv << "k,l,re,im\n";
    csv.precision(17);
    for (std::size_t i = 0; i < diag.size(); ++i) {
      csv << lattice.points()[i].k << ',' << lattice.points()[i].l << ',' << diag[i].real() << ','
          << diag[i].imag() << '\n';
    }
  }
  return r;
}

nlohmann::json uniqueness_cmd(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const TimeGrid grid = make_grid(cfg);
  const Window g = stage("window", [&] { return make_window(cfg, grid); });
  const auto lattice = stage("lattice", [&] { return build_lattice(grid, cfg.a, cfg.b, cfg.k1, cfg.k2); });
  const Box band = cfg.band.value_or(q_eps(cfg, lattice));
  const auto map = stage("assemble", [&] { return assemble_map(g, lattice, band); });
  const auto full = stage("svd", [&] { return full_injectivity_svd(map); });
  std::optional<ObstructionReport> obstruction;
  if (lattice.ab() < 1.0 - 1e-12) {
    obstruction = stage("obstruction", [&] { return diagonal_obstruction_svd(map); });
  } else {
    ctx.warnings.push_back("ab >= 1: diagonal obstruction not evaluated (needs ab < 1)");
  }
  if (cfg.window != WindowKind::gaussian) {
    ctx.warnings.push_back("injectivity is only asserted for the gaussian window");
  }
  return uniqueness_report(map, full, obstruction ? &*obstruction : nullptr);
}

nlohmann::json ofdm_cmd(Context& ctx) {
  const auto report = run_pipeline(ofdm_config(ctx.cfg));
  if (report.band_violation > 1e-12) {
    ctx.warnings.push_back("channel spreading extends beyond the pilot kernel's flat region");
  }
  if (ctx.out) {
    stage("write", [&] { io::save_channel_matrix(report.H_est, *ctx.out / "H_est"); return 0; });
  }
  if (auto d = ctx.dump_dir()) {
    io::export_csv(report.tx_signal, *d / "tx_signal.csv");
    io::export_csv(report.rx_signal, *d / "rx_signal.csv");
    io::export_channel_csv(report.H_est, *d / "H_est.csv");
    io::export_channel_csv(report.H_true, *d / "H_true.csv");
    std::ofstream csv(*d / "coefficients.csv");
    csv << "index,data_re,data_im,y_re,y_im,c_est_re,c_est_im,decision_re,decision_im\n";
    csv.precision(17);
    for (std::size_t i = 0; i < report.data.size(); ++i) {
      csv << i << ',' << report.data[i].real() << ',' << report.data[i].imag() << ','
          << report.y[i].real() << ',' << report.y[i].imag() << ',' << report.c_est[i].real() << ','
          << report.c_est[i].imag() << ',' << report.decisions[i].real() << ','
          << report.decisions[i].imag() << '\n';
    }
    std::ofstream pil(*d / "pilots.csv");
    pil << "index,diag_re,diag_im,leakage_bound\n";
    pil.precision(17);
    for (std::size_t i = 0; i < report.pilots.diag_est.size(); ++i) {
      pil << report.pilots.pilot_indices[i] << ',' << report.pilots.diag_est[i].real() << ','
          << report.pilots.diag_est[i].imag() << ',' << report.pilots.leakage_bound[i] << '\n';
    }
  }
  auto j = to_json(report);
  j["snr_db"] = number(ctx.cfg.snr_db);
  return j;
}

nlohmann::json calibrate_cmd(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const TimeGrid grid = make_grid(cfg);
  const Window g = stage("window", [&] { return make_window(cfg, grid); });
  auto lattice = stage("lattice", [&] { return build_lattice(grid, cfg.a, cfg.b, cfg.k1, cfg.k2); });
  const auto kernel = stage("kernel", [&] {
    const auto bump = build_bump(spreading_plane(grid), q_eps(cfg, lattice), lattice.nyquist_box(),
                                 cfg.profile);
    return build_kernel(g, lattice, bump, cfg.nonvanish_tol);
  });
  nlohmann::json seeds = nlohmann::json::array();
  double lo = INFINITY, hi = -INFINITY;
  cplx first{};
  double spread = 0.0;
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto c = stage("calibrate", [&] { return calibrate(kernel, lattice, g, cfg.calibration_seed + s); });
    if (s == 0) first = c.measured;
    spread = std::max(spread, std::abs(c.measured - first) / std::abs(first));
    lo = std::min(lo, c.measured.real());
    hi = std::max(hi, c.measured.real());
    seeds.push_back({{"seed", cfg.calibration_seed + s},
                     {"measured", {c.measured.real(), c.measured.imag()}},
                     {"relative_to_ab", c.relative_to_ab}});
  }
  nlohmann::json r;
  r["ab"] = lattice.ab();
  r["measured"] = first.real();
  r["measured_imag"] = first.imag();
  r["relative_to_ab"] = std::abs(first - lattice.ab()) / lattice.ab();
  r["seed_spread"] = spread;
  r["per_seed"] = seeds;
  return r;
}

nlohmann::json dispatch(Context& ctx) {
  switch (ctx.cfg.command) {
    case Command::synth_symbol: return synth_symbol(ctx);
    case Command::channel_matrix: return channel_matrix_cmd(ctx);
    case Command::reconstruct: return reconstruct_cmd(ctx);
    case Command::uniqueness_svd: return uniqueness_cmd(ctx);
    case Command::ofdm_demo: return ofdm_cmd(ctx);
    case Command::calibrate: return calibrate_cmd(ctx);
  }
  throw StageError("dispatch", "unknown command");
}

nlohmann::json execute(const ScenarioConfig& cfg, const RunOptions& options,
                       std::optional<fs::path> out) {
  Context ctx{cfg, options, std::move(out)};
  nlohmann::json report;
  report["command"] = to_string(cfg.command);
  report["config"] = to_json(cfg);
  report["result"] = dispatch(ctx);
  report["warnings"] = ctx.warnings;
  return report;
}

}  // namespace

nlohmann::json evaluate(const ScenarioConfig& cfg, const RunOptions& options) {
  return execute(cfg, options, std::nullopt);
}

nlohmann::json run(const ScenarioConfig& cfg, const RunOptions& options) {
  stage("output", [&] { fs::create_directories(cfg.output_dir); return 0; });
  const auto start = std::chrono::steady_clock::now();
  auto report = execute(cfg, options, cfg.output_dir);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  stage("write", [&] {
    io::write_json(report, cfg.output_dir / "report.json");
    io::write_json({{"runtime_ms", ms}}, cfg.output_dir / "timing.json");
    return 0;
  });
  return report;
}

}  // namespace tfchan
