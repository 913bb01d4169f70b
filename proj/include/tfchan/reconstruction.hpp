#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tfchan/gabor.hpp"
#include "tfchan/grid.hpp"
#include "tfchan/tf.hpp"

namespace tfchan {

enum class BumpProfile { indicator, quintic, mollifier };

std::string to_string(BumpProfile p);
BumpProfile bump_profile_from_string(const std::string& s);

/// Separable cutoff phi on the spreading plane: 1 on inner, 0 outside outer, a monotone
/// transition in between.
struct BumpFunction {
  Box inner;
  Box outer;
  BumpProfile profile = BumpProfile::quintic;
  SampledSymbol samples;

  bool smooth() const { return profile != BumpProfile::indicator; }
};

/// Throws DomainError when inner is not inside outer (or inner != outer for the indicator).
BumpFunction build_bump(const PlaneGrid& spreading_grid, Box inner, Box outer,
                        BumpProfile profile);

/// Q_eps = Q shrunk by eps on every side.
Box shrink(const Box& box, double eps);

/// Deconvolution multiplier khat = phi / conj(G), G = U V_g g, on the spreading plane.
struct ReconstructionKernel {
  SampledSymbol G;
  BumpFunction phi;
  SampledSymbol khat;
  double min_abs_G_on_support = 0.0;
  /// Frequency point of the minimum.
  double min_eta = 0.0, min_u = 0.0;
  std::optional<cplx> calibration_constant;
  /// Lattice (a, b) the kernel was built for.
  double a = 0.0, b = 0.0;
};

/// Uses the Gaussian closed form for gaussian windows and u_swap(stft(g, g)) otherwise.
/// Throws NonvanishingViolation when min |G| over {phi > 0} is below nonvanish_tol.
ReconstructionKernel build_kernel(const Window& g, const GaborLattice& lattice,
                                  const BumpFunction& bump, double nonvanish_tol = 1e-6);

/// U V_g g on the spreading plane of the window's grid, computed numerically.
SampledSymbol ambiguity_numeric(const Window& g);

/// sinc(x / a) sinc(xi / b), sinc(t) = sin(pi t) / (pi t), on the symbol plane.
SampledSymbol sinc_lattice(const PlaneGrid& symbol_grid, const GaborLattice& lattice);

/// C * (sum_lambda d_lambda exp(-2 pi i lambda . omega)) * khat(omega) on the spreading plane.
SampledSymbol reconstruct_spreading(const std::vector<cplx>& diag, const GaborLattice& lattice,
                                    const ReconstructionKernel& kernel, cplx constant);

/// Frequency route; throws DomainError for an uncalibrated kernel.
SampledSymbol reconstruct_frequency(const std::vector<cplx>& diag, const GaborLattice& lattice,
                                    const ReconstructionKernel& kernel);

struct TimeReconstruction {
  SampledSymbol symbol;
  /// max |d| on the outermost lattice ring over max |d|; 0 when the lattice is the full torus.
  double truncation_tail = 0.0;
};

/// Time route: C * sum_lambda d_lambda T_lambda K with K = F^-1(khat), summed directly.
TimeReconstruction reconstruct_time(const std::vector<cplx>& diag, const GaborLattice& lattice,
                                    const ReconstructionKernel& kernel);

/// The kernel K = F^-1(khat) on the symbol plane.
SampledSymbol kernel_in_symbol_domain(const ReconstructionKernel& kernel);

struct Calibration {
  ReconstructionKernel kernel;
  cplx measured;
  double relative_to_ab = 0.0;
};

/// Fixes the kernel's scalar from a known calibration operator whose spreading is a seeded
/// amplitude times a quintic bump strictly inside the flat part of phi. Throws DomainError when
/// the raw reconstruction vanishes or the constant is more than 1% from ab.
Calibration calibrate(const ReconstructionKernel& kernel, const GaborLattice& lattice,
                      const Window& g, std::uint64_t seed = 0);

/// Calibration operator used by calibrate().
KNOperator calibration_operator(const ReconstructionKernel& kernel, const TimeGrid& grid,
                                std::uint64_t seed);

}  // namespace tfchan
