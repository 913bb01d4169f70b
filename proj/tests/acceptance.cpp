// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "tfchan/error.hpp"
#include "tfchan/fourier.hpp"
#include "tfchan/gabor.hpp"
#include "tfchan/ofdm.hpp"
#include "tfchan/psido.hpp"
#include "tfchan/reconstruction.hpp"
#include "tfchan/tf.hpp"
#include "tfchan/uniqueness.hpp"

using namespace tfchan;
using tfchan::testing::random_localized;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(const SampledSymbol& a, const SampledSymbol& b) { return relative_error(a.values, b.values); }

ReconstructionKernel calibrated_kernel(const Window& w, const GaborLattice& lat, double eps) {
  const Box q = lat.nyquist_box();
  const auto bump = build_bump(spreading_plane(w.signal.grid), shrink(q, eps), q, BumpProfile::quintic);
  return calibrate(build_kernel(w, lat, bump), lat, w).kernel;
}

// Diagonal of H against sigma * R(g, g)^* sampled on the lattice.
Outcome diagonal_formula() {
  const auto t0 = std::chrono::steady_clock::now();
  const TimeGrid g(256, 16.0);
  const auto w = gaussian_window(g);
  const auto lat = build_lattice(g, 1.0, 1.0, 3, 3);
  const auto blur = star_involution(rihaczek(w.signal, w.signal));
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto op = synth_bandlimited(g, Box{0.375, 0.375}, 1000 + s,
                                      s % 2 ? Smoothness::white : Smoothness::smooth);
    auto sigma = op.symbol();
    sigma.support_box.reset();
    const auto conv = convolve2d(sigma, blur);
    const auto diag = channel_matrix(op, w, lat).diagonal();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < lat.size(); ++i) {
      const auto z = lat.shift(i);
      const cplx c = conv.at(conv.grid.axis1.wrap(z.time), conv.grid.axis2.wrap(z.freq));
      num = std::max(num, std::abs(diag[i] - c));
      den = std::max(den, std::abs(c));
    }
    worst = std::max(worst, num / den);
  }
  const double t = seconds_since(t0);
  std::ostringstream d;
  d << "max relative deviation " << worst << " over 10 operators, " << t << " s";
  return {worst <= 1e-7 && t <= 60.0, d.str()};
}

Outcome reconstruction() {
  const auto t0 = std::chrono::steady_clock::now();
  const TimeGrid g(256, 16.0);
  const auto w = gaussian_window(g);
  const auto lat = build_full_lattice(g, 1.0, 1.0);
  const auto kernel = calibrated_kernel(w, lat, 2.0 * g.dual_step());
  const Box band = shrink(lat.nyquist_box(), 2.0 * g.dual_step());

  double smooth_err = 0.0, routes = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto op = synth_bandlimited(g, band, 2000 + s, Smoothness::smooth);
    const auto d = channel_matrix(op, w, lat).diagonal();
    const auto rf = reconstruct_frequency(d, lat, kernel);
    const auto rt = reconstruct_time(d, lat, kernel);
    smooth_err = std::max(smooth_err, rel(rf, op.symbol()));
    routes = std::max(routes, rel(rt.symbol, rf));
  }

  // Gaussian spreading of width 0.2 under a quintic envelope on the band.
  const PlaneGrid plane = spreading_plane(g);
  const auto taper = build_bump(plane, Box{0.0, 0.0}, band, BumpProfile::quintic);
  SampledSymbol sp(plane, SymbolDomain::spreading);
  for (std::size_t i = 0; i < sp.rows(); ++i) {
    for (std::size_t j = 0; j < sp.cols(); ++j) {
      const double e = plane.axis1.point(i) / 0.2, u = plane.axis2.point(j) / 0.2;
      sp.at(i, j) = cplx(-0.4, 0.9) * std::exp(-kPi * (e * e + u * u)) * taper.samples.at(i, j);
    }
  }
  const auto env = KNOperator::from_spreading(std::move(sp), band);
  const auto d = channel_matrix(env, w, lat).diagonal();
  const auto rf = reconstruct_frequency(d, lat, kernel);
  const auto rt = reconstruct_time(d, lat, kernel);
  const double env_err = rel(rf, env.symbol());
  routes = std::max(routes, rel(rt.symbol, rf));

  const double t = seconds_since(t0);
  std::ostringstream o;
  o << "smooth error " << smooth_err << ", enveloped error " << env_err << " (tail "
    << rt.truncation_tail << "), route agreement " << routes << ", " << t << " s";
  return {smooth_err <= 1e-3 && env_err <= 1e-6 && rt.truncation_tail < 1e-8 && routes <= 1e-6 &&
              t <= 120.0,
          o.str()};
}

Outcome scatterer_proxy() {
  const TimeGrid g(256, 16.0);
  const auto w = gaussian_window(g);
  const auto lat = build_full_lattice(g, 1.0, 1.0);
  const auto kernel = calibrated_kernel(w, lat, 2.0 * g.dual_step());
  const std::vector<Scatterer> truth{{cplx(1.0, 0.0), 0.125, -0.25},
                                     {cplx(0.6, -0.3), -0.3125, 0.1875},
                                     {cplx(0.0, 0.45), 0.25, 0.3125}};
  const auto op = KNOperator::from_scatterers(g, truth);
  const auto sp = reconstruct_spreading(diag_direct(op, w, lat), lat, kernel, *kernel.calibration_constant);
  const PlaneGrid& plane = sp.grid;

  struct Peak {
    double mag;
    std::size_t i, j;
  };
  std::vector<Peak> peaks;
  const long n1 = static_cast<long>(sp.rows()), n2 = static_cast<long>(sp.cols());
  for (long i = 0; i < n1; ++i) {
    for (long j = 0; j < n2; ++j) {
      const double m = std::abs(sp.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
      if (m == 0.0) continue;
      bool is_max = true;
      for (long di = -1; di <= 1 && is_max; ++di) {
        for (long dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const auto ii = static_cast<std::size_t>((i + di + n1) % n1);
          const auto jj = static_cast<std::size_t>((j + dj + n2) % n2);
          if (std::abs(sp.at(ii, jj)) > m) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({m, static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.mag > b.mag; });
  if (peaks.size() < 3) return {false, "fewer than 3 local maxima"};

  std::size_t located = 0;
  double amp_err = 0.0;
  for (const auto& s : truth) {
    bool found = false;
    for (std::size_t p = 0; p < 3; ++p) {
      const double eta = plane.axis1.point(peaks[p].i), u = plane.axis2.point(peaks[p].j);
      if (std::abs(eta - s.eta) < 1e-12 && std::abs(u - s.u) < 1e-12) {
        found = true;
        const cplx amp = sp.at(peaks[p].i, peaks[p].j) * plane.cell();
        amp_err = std::max(amp_err, std::abs(amp - s.amplitude) / std::abs(s.amplitude));
      }
    }
    located += found;
  }
  std::ostringstream o;
  o << located << "/3 scatterers at the top local maxima, max amplitude error " << amp_err;
  return {located == 3 && amp_err <= 0.01, o.str()};
}

Outcome route_equivalence() {
  const TimeGrid g(256, 16.0);
  double routes = 0.0, bil = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto op = synth_bandlimited(g, Box{1.5, 1.5}, 3000 + s,
                                      s % 2 ? Smoothness::smooth : Smoothness::white);
    const auto f = random_localized(g, 3100 + s), h = random_localized(g, 3200 + s);
    const auto a = apply_spreading(op, f), b = apply_symbol(op, f);
    routes = std::max(routes, relative_error(a.values, b.values));
    const cplx k = kn_bilinear(op, f, h);
    const double scale = std::abs(inner(a, h));
    bil = std::max({bil, std::abs(k - inner(a, h)) / scale, std::abs(k - inner(b, h)) / scale});
  }
  std::ostringstream o;
  o << "spreading vs symbol " << routes << ", bilinear " << bil << " over 20 pairs";
  return {routes <= 1e-8 && bil <= 1e-8, o.str()};
}

Outcome injectivity() {
  const TimeGrid g(256, 16.0);
  const auto w = gaussian_window(g);
  const auto lat = build_lattice(g, 1.0, 1.0, 6, 6);
  const auto map = assemble_map(w, lat, shrink(lat.nyquist_box(), 2.0 * g.dual_step()));
  const auto s = full_injectivity_svd(map);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto op = synth_bandlimited(g, map.band_box, 4000 + seed, Smoothness::white);
    const Eigen::VectorXcd truth = coefficients_of(map, op);
    const Eigen::VectorXcd x = solve_coefficients(map, channel_matrix(op, w, lat).entries);
    worst = std::max(worst, (x - truth).norm() / truth.norm());
  }
  std::ostringstream o;
  o << map.basis.size() << " band points, sigma_min/sigma_max " << s.ratio()
    << ", least-squares error " << worst;
  return {s.sigma_min > 1e-6 * s.sigma_max && worst <= 1e-6, o.str()};
}

Outcome obstruction() {
  const TimeGrid g(128, std::sqrt(128.0));
  const double a = 1.0 / std::sqrt(2.0);
  const auto lat = build_lattice(g, a, a, 5, 5);
  const auto map = assemble_map(gaussian_window(g), lat, shrink(lat.nyquist_box(), 6.0 * g.dual_step()));
  const auto rep = diagonal_obstruction_svd(map);

  // ab = 1 with an orthonormal basis: the identity has an exactly diagonal matrix
  const TimeGrid g1(256, 16.0);
  const auto basis = basis_window(g1, 1.0);
  const auto lat1 = build_lattice(g1, 1.0, 1.0, 3, 3);
  const auto h = channel_matrix(identity_operator(g1), basis, lat1).entries;
  const Eigen::MatrixXcd off = h - Eigen::MatrixXcd(h.diagonal().asDiagonal());
  const double diag_min = h.diagonal().cwiseAbs().minCoeff();
  const auto contrast = offdiag_svd(assemble_map(basis, lat1, Box{0.125, 0.125}));

  std::ostringstream o;
  o << "ab=1/2: A=" << rep.A_est << " B=" << rep.B_est << ", sigma_min_offdiag "
    << rep.offdiag.sigma_min << " (sigma_max " << rep.offdiag.sigma_max << "); ab=1 basis: "
    << "off-diagonal norm " << off.norm() << ", offdiag sigma_min " << contrast.sigma_min;
  return {rep.A_est > 0.1 * rep.B_est && rep.offdiag.sigma_min > 1e-8 * rep.offdiag.sigma_max &&
              off.norm() <= 1e-12 && diag_min > 0.5 && contrast.sigma_min <= 1e-12 * contrast.sigma_max,
          o.str()};
}

Outcome gaussian_closed_forms() {
  const TimeGrid g(256, 16.0);
  const auto w = gaussian_window(g);
  const auto v = stft(w.signal, w);
  double sup = 0.0, sup_mod = 0.0;
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < v.cols(); ++j) {
      const double x = v.grid.axis1.point(i), xi = v.grid.axis2.point(j);
      const double env = std::exp(-kPi / 2 * (x * x + xi * xi)) / std::sqrt(2.0);
      // phase of V_g g(x, xi) = integral g(t) g(t - x) exp(-2 pi i xi t) dt
      const cplx expect = env * std::exp(cplx(0.0, -kPi * xi * x));
      sup = std::max(sup, std::abs(v.at(i, j) - expect));
      sup_mod = std::max(sup_mod, std::abs(std::abs(v.at(i, j)) - env));
    }
  }
  const auto lat = build_full_lattice(g, 1.0, 1.0);
  const Box q = lat.nyquist_box();
  const auto k = build_kernel(w, lat, build_bump(spreading_plane(g), q, q, BumpProfile::indicator));
  const double corner = std::exp(-kPi / 4) / std::sqrt(2.0);
  const double dev = std::abs(k.min_abs_G_on_support - corner);
  std::ostringstream o;
  o << "STFT sup error " << sup << " (modulus " << sup_mod << "), min |G| on Q "
    << k.min_abs_G_on_support << " vs " << corner;
  return {sup <= 1e-8 && sup_mod <= 1e-8 && dev <= 1e-4, o.str()};
}

Outcome ofdm() {
  OfdmConfig cfg;
  cfg.seed = 1;
  const auto clean = run_pipeline(cfg);
  const std::vector<double> snrs{40.0, 30.0, 20.0, 10.0};
  std::vector<double> ser(snrs.size(), 0.0);
  for (std::uint64_t s = 0; s < 10; ++s) {
    for (std::size_t q = 0; q < snrs.size(); ++q) {
      OfdmConfig c;
      c.seed = 500 + s;
      c.snr_db = snrs[q];
      ser[q] += run_pipeline(c).sER / 10.0;
    }
  }
  bool monotone = true;
  for (std::size_t q = 1; q < ser.size(); ++q) monotone = monotone && ser[q] >= ser[q - 1];
  std::ostringstream o;
  o << "noiseless sER " << clean.sER << ", H_est error " << clean.h_est_relative_error
    << "; mean sER at 40/30/20/10 dB: " << ser[0] << " " << ser[1] << " " << ser[2] << " " << ser[3];
  return {clean.sER == 0.0 && clean.h_est_relative_error <= 1e-4 && monotone, o.str()};
}

Outcome calibration() {
  const TimeGrid g(256, 16.0);
  const auto w = gaussian_window(g);
  std::ostringstream o;
  bool ok = true;
  for (const double a : {1.0, 0.5}) {
    const auto lat = build_full_lattice(g, a, a);
    const Box q = lat.nyquist_box();
    const auto raw = build_kernel(w, lat, build_bump(spreading_plane(g), shrink(q, 2.0 * g.dual_step()), q,
                                                     BumpProfile::quintic));
    std::vector<cplx> cs;
    for (std::uint64_t s = 0; s < 5; ++s) cs.push_back(calibrate(raw, lat, w, s).measured);
    double spread = 0.0;
    for (const auto& c : cs) spread = std::max(spread, std::abs(c - cs[0]) / std::abs(cs[0]));
    const double off = std::abs(cs[0] - lat.ab()) / lat.ab();
    ok = ok && off <= 0.01 && spread <= 1e-6;
    o << "ab=" << lat.ab() << ": C=" << cs[0].real() << " (" << off << " from ab, seed spread " << spread
      << ") ";
  }
  return {ok, o.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"diagonal as a blurred symbol", diagonal_formula},
      {"reconstruction", reconstruction},
      {"scatterer channel proxy", scatterer_proxy},
      {"operator route equivalence", route_equivalence},
      {"injectivity of the symbol-to-matrix map", injectivity},
      {"diagonal obstruction at ab = 1/2", obstruction},
      {"Gaussian closed forms", gaussian_closed_forms},
      {"end-to-end OFDM", ofdm},
      {"calibration constant", calibration},
  };
  int failures = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    Outcome r;
    try {
      r = criteria[c].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures += !r.pass;
    std::printf("%s %zu %s: %s\n", r.pass ? "PASS" : "FAIL", c + 1, criteria[c].first.c_str(),
                r.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
