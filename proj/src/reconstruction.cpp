#include "tfchan/reconstruction.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "tfchan/error.hpp"
#include "tfchan/fourier.hpp"

namespace tfchan {

std::string to_string(BumpProfile p) {
  switch (p) {
    case BumpProfile::indicator: return "indicator";
    case BumpProfile::quintic: return "quintic";
    case BumpProfile::mollifier: return "mollifier";
  }
  return "quintic";
}

BumpProfile bump_profile_from_string(const std::string& s) {
  if (s == "indicator") return BumpProfile::indicator;
  if (s == "quintic") return BumpProfile::quintic;
  if (s == "mollifier") return BumpProfile::mollifier;
  throw DomainError("unknown bump profile '" + s + "'");
}

Box shrink(const Box& box, double eps) { return {box.half1 - eps, box.half2 - eps}; }

namespace {

double smooth_step(double t, BumpProfile profile) {
  if (profile == BumpProfile::quintic) return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
  // C-infinity step psi(t) / (psi(t) + psi(1 - t)), psi(t) = exp(-1/t).
  const auto psi = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  const double p = psi(t), q = psi(1.0 - t);
  return p / (p + q);
}

double axis_profile(double r, double inner, double outer, BumpProfile profile, double slack) {
  const double x = std::abs(r);
  if (profile == BumpProfile::indicator) return x <= outer + slack ? 1.0 : 0.0;
  if (x <= inner + slack) return 1.0;
  if (x >= outer - slack) return 0.0;
  return 1.0 - smooth_step((x - inner) / (outer - inner), profile);
}

}  // namespace

BumpFunction build_bump(const PlaneGrid& spreading_grid, Box inner, Box outer,
                        BumpProfile profile) {
  if (!(outer.half1 > 0.0) || !(outer.half2 > 0.0)) {
    throw DomainError("build_bump: outer box is degenerate");
  }
  if (inner.half1 < 0.0 || inner.half2 < 0.0) throw DomainError("build_bump: inner box is empty");
  if (profile == BumpProfile::indicator) {
    if (inner.half1 > outer.half1 || inner.half2 > outer.half2) {
      throw DomainError("build_bump: inner box must lie inside the outer box");
    }
  } else if (!(inner.half1 < outer.half1) || !(inner.half2 < outer.half2)) {
    throw DomainError("build_bump: a smooth profile needs the inner box strictly inside");
  }
  const double s1 = 1e-9 * spreading_grid.axis1.step();
  const double s2 = 1e-9 * spreading_grid.axis2.step();
  SampledSymbol samples(spreading_grid, SymbolDomain::spreading);
  for (std::size_t i = 0; i < samples.rows(); ++i) {
    const double p1 =
        axis_profile(spreading_grid.axis1.point(i), inner.half1, outer.half1, profile, s1);
    if (p1 == 0.0) continue;
    for (std::size_t j = 0; j < samples.cols(); ++j) {
      samples.at(i, j) =
          p1 * axis_profile(spreading_grid.axis2.point(j), inner.half2, outer.half2, profile, s2);
    }
  }
  samples.support_box = outer;
  return BumpFunction{inner, outer, profile, std::move(samples)};
}

SampledSymbol ambiguity_numeric(const Window& g) {
  return u_swap(stft(g.signal, g.signal));
}

ReconstructionKernel build_kernel(const Window& g, const GaborLattice& lattice,
                                  const BumpFunction& bump, double nonvanish_tol) {
  const Box q = lattice.nyquist_box();
  if (std::abs(bump.outer.half1 - q.half1) > 1e-9 * q.half1 ||
      std::abs(bump.outer.half2 - q.half2) > 1e-9 * q.half2) {
    std::ostringstream msg;
    msg << "build_kernel: bump outer box [" << bump.outer.half1 << ", " << bump.outer.half2
        << "] must equal Q = [" << q.half1 << ", " << q.half2 << "] of the lattice";
    throw DomainError(msg.str());
  }
  const PlaneGrid plane = spreading_plane(lattice.grid());
  if (bump.samples.grid != plane) throw GridMismatch("build_kernel: bump lives on another plane");

  ReconstructionKernel kernel{SampledSymbol(plane, SymbolDomain::spreading),
                              bump,
                              SampledSymbol(plane, SymbolDomain::spreading),
                              0.0,
                              0.0,
                              0.0,
                              std::nullopt,
                              lattice.a(),
                              lattice.b()};
  if (g.closed_form_stft_available && g.kind == WindowKind::gaussian) {
    kernel.G = sample_function(plane, gaussian_ambiguity, SymbolDomain::spreading);
  } else {
    kernel.G = ambiguity_numeric(g);
    kernel.G.grid = plane;
  }
  kernel.khat.support_box = bump.outer;
  double min_abs = INFINITY;
  for (std::size_t i = 0; i < plane.axis1.size(); ++i) {
    for (std::size_t j = 0; j < plane.axis2.size(); ++j) {
      const double phi = bump.samples.at(i, j).real();
      if (phi <= 0.0) continue;
      const cplx gv = kernel.G.at(i, j);
      if (std::abs(gv) < min_abs) {
        min_abs = std::abs(gv);
        kernel.min_eta = plane.axis1.point(i);
        kernel.min_u = plane.axis2.point(j);
      }
      kernel.khat.at(i, j) = phi / std::conj(gv);
    }
  }
  kernel.min_abs_G_on_support = min_abs;
  if (!(min_abs >= nonvanish_tol)) {
    std::ostringstream msg;
    msg << "U V_g g nearly vanishes on supp phi: |G(" << kernel.min_eta << ", " << kernel.min_u
        << ")| = " << min_abs << " < " << nonvanish_tol;
    throw NonvanishingViolation(msg.str(), kernel.min_eta, kernel.min_u, min_abs);
  }
  return kernel;
}

SampledSymbol sinc_lattice(const PlaneGrid& symbol_grid, const GaborLattice& lattice) {
  const auto sinc = [](double t) {
    if (std::abs(t) < 1e-12) return 1.0;
    // Exact zeros at nonzero integers.
    const double r = std::round(t);
    if (std::abs(t - r) < 1e-12) return 0.0;
    return std::sin(kPi * t) / (kPi * t);
  };
  const double a = lattice.a(), b = lattice.b();
  return sample_function(symbol_grid,
                         [&](double x, double xi) { return cplx(sinc(x / a) * sinc(xi / b), 0.0); });
}

SampledSymbol reconstruct_spreading(const std::vector<cplx>& diag, const GaborLattice& lattice,
                                    const ReconstructionKernel& kernel, cplx constant) {
  if (diag.size() != lattice.size()) {
    throw GridMismatch("reconstruct: diagonal has " + std::to_string(diag.size()) +
                       " entries for a lattice of " + std::to_string(lattice.size()));
  }
  if (std::abs(kernel.a - lattice.a()) > 1e-12 || std::abs(kernel.b - lattice.b()) > 1e-12) {
    throw DomainError("reconstruct: kernel was built for a different lattice");
  }
  const auto& khat = kernel.khat;
  const PlaneGrid& plane = khat.grid;
  const std::size_t n1 = plane.axis1.size(), n2 = plane.axis2.size();
  const UnitRoots roots(lattice.grid().size());
  SampledSymbol out(plane, SymbolDomain::spreading);
  out.support_box = kernel.phi.outer;
#pragma omp parallel for schedule(dynamic)
  for (long ii = 0; ii < static_cast<long>(n1); ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    const long eta = plane.axis1.offset(i);
    for (std::size_t j = 0; j < n2; ++j) {
      const cplx kv = khat.at(i, j);
      if (kv == cplx{}) continue;
      const long u = plane.axis2.offset(j);
      cplx acc{};
      for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
        const auto s = lattice.shift(idx);
        // lambda . omega = (s.time dt)(eta df) + (s.freq df)(u dt) = (s.time eta + s.freq u) / n
        acc += diag[idx] * roots(-(s.time * eta + s.freq * u));
      }
      out.at(i, j) = constant * acc * kv;
    }
  }
  return out;
}

SampledSymbol reconstruct_frequency(const std::vector<cplx>& diag, const GaborLattice& lattice,
                                    const ReconstructionKernel& kernel) {
  if (!kernel.calibration_constant) {
    throw DomainError("reconstruct_frequency: kernel is not calibrated");
  }
  auto spreading = reconstruct_spreading(diag, lattice, kernel, *kernel.calibration_constant);
  spreading.support_box.reset();
  return fourier2d(spreading, Direction::inverse);
}

SampledSymbol kernel_in_symbol_domain(const ReconstructionKernel& kernel) {
  auto khat = kernel.khat;
  khat.support_box.reset();
  return fourier2d(khat, Direction::inverse);
}

TimeReconstruction reconstruct_time(const std::vector<cplx>& diag, const GaborLattice& lattice,
                                    const ReconstructionKernel& kernel) {
  if (!kernel.calibration_constant) throw DomainError("reconstruct_time: kernel is not calibrated");
  if (diag.size() != lattice.size()) throw GridMismatch("reconstruct_time: diagonal size mismatch");
  const auto k_sym = kernel_in_symbol_domain(kernel);
  const PlaneGrid& plane = k_sym.grid;
  const std::size_t n1 = plane.axis1.size(), n2 = plane.axis2.size();
  const cplx c = *kernel.calibration_constant;
  TimeReconstruction out{SampledSymbol(plane, SymbolDomain::symbol)};

  std::vector<std::pair<cplx, GridShift>> active;
  for (std::size_t idx = 0; idx < diag.size(); ++idx) {
    if (diag[idx] != cplx{}) active.emplace_back(diag[idx], lattice.shift(idx));
  }
#pragma omp parallel
  {
    std::vector<cplx> row(n2);
#pragma omp for schedule(static)
    for (long ii = 0; ii < static_cast<long>(n1); ++ii) {
      const std::size_t i = static_cast<std::size_t>(ii);
      const long x = plane.axis1.offset(i);
      std::fill(row.begin(), row.end(), cplx{});
      for (const auto& [d, s] : active) {
        const std::size_t si = plane.axis1.wrap(x - s.time);
        // axis2 shift by s.freq is a cyclic rotation of the kernel row
        const std::size_t start = plane.axis2.wrap(plane.axis2.offset(0) - s.freq);
        for (std::size_t m = 0, src = start; m < n2; ++m, src = src + 1 == n2 ? 0 : src + 1) {
          row[m] += d * k_sym.at(si, src);
        }
      }
      for (std::size_t m = 0; m < n2; ++m) out.symbol.at(i, m) = c * row[m];
    }
  }

  if (!lattice.covers_torus()) {
    long kmin = 0, kmax = 0, lmin = 0, lmax = 0;
    for (const auto& p : lattice.points()) {
      kmin = std::min(kmin, p.k);
      kmax = std::max(kmax, p.k);
      lmin = std::min(lmin, p.l);
      lmax = std::max(lmax, p.l);
    }
    double ring = 0.0;
    for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
      const auto& p = lattice.points()[idx];
      if (p.k == kmin || p.k == kmax || p.l == lmin || p.l == lmax) {
        ring = std::max(ring, std::abs(diag[idx]));
      }
    }
    const double peak = max_abs(diag);
    out.truncation_tail = peak > 0.0 ? ring / peak : 0.0;
  }
  return out;
}

KNOperator calibration_operator(const ReconstructionKernel& kernel, const TimeGrid& grid,
                                std::uint64_t seed) {
  const PlaneGrid plane = spreading_plane(grid);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.5, 2.0), arg(-kPi, kPi);
  const cplx amplitude = std::polar(mag(rng), arg(rng));
  const Box box = kernel.phi.inner;
  if (!(box.half1 > 0.0) || !(box.half2 > 0.0)) {
    throw DomainError("calibrate: the bump's flat region is empty");
  }
  const auto bump = build_bump(plane, Box{0.0, 0.0}, box, BumpProfile::quintic);
  SampledSymbol sp(plane, SymbolDomain::spreading);
  for (std::size_t k = 0; k < sp.values.size(); ++k) sp.values[k] = amplitude * bump.samples.values[k];
  return KNOperator::from_spreading(std::move(sp), box);
}

Calibration calibrate(const ReconstructionKernel& kernel, const GaborLattice& lattice,
                      const Window& g, std::uint64_t seed) {
  // The constant belongs to (a, b); measure it on the full periodic lattice.
  const auto full = build_full_lattice(lattice.grid(), lattice.a(), lattice.b());
  const auto op = calibration_operator(kernel, lattice.grid(), seed);
  const auto diag = diag_via_convolution(op, g, full);
  auto raw_spreading = reconstruct_spreading(diag, full, kernel, cplx(1.0, 0.0));
  raw_spreading.support_box.reset();
  const auto raw = fourier2d(raw_spreading, Direction::inverse);
  const double raw_norm = raw.norm();
  if (!(raw_norm > 1e-300)) throw DomainError("calibrate: raw reconstruction is numerically zero");
  const cplx c = inner(op.symbol(), raw) / (raw_norm * raw_norm);
  const double ab = lattice.ab();
  Calibration out{kernel, c, std::abs(c - ab) / ab};
  if (out.relative_to_ab > 0.01) {
    std::ostringstream msg;
    msg << "calibrate: measured constant " << c << " deviates from ab=" << ab << " by "
        << out.relative_to_ab * 100.0 << "%";
    throw DomainError(msg.str());
  }
  out.kernel.calibration_constant = c;
  return out;
}

}  // namespace tfchan
