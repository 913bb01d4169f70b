#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"
#include "tfchan/grid.hpp"
#include "tfchan/tf.hpp"

namespace tfchan {

/// One exact time-frequency shift term amplitude * M_eta T_{-u}.
struct Scatterer {
  cplx amplitude{1.0, 0.0};
  double eta = 0.0;
  double u = 0.0;
};

/// Kohn-Nirenberg operator with a sampled symbol/spreading pair, or a finite sum of exact
/// time-frequency shifts (point scatterers). Exactly one representation is populated.
class KNOperator {
 public:
  /// From a spreading array (tag spreading) on spreading_plane(signal grid).
  static KNOperator from_spreading(SampledSymbol spreading, Box band_box);
  /// From a symbol array (tag symbol); the spreading is its forward transform.
  static KNOperator from_symbol(SampledSymbol symbol, Box band_box);
  static KNOperator from_scatterers(TimeGrid signal_grid, std::vector<Scatterer> shifts);

  bool has_samples() const { return symbol_.has_value(); }
  const SampledSymbol& symbol() const;
  const SampledSymbol& spreading() const;
  const std::vector<Scatterer>& exact_shifts() const { return shifts_; }
  const Box& band_box() const { return band_; }
  const TimeGrid& signal_grid() const { return signal_grid_; }

  /// alpha * this + beta * other (both sampled, same grids, band = union box).
  KNOperator combine(cplx alpha, const KNOperator& other, cplx beta) const;
  /// Symbol values sigma(x, xi) for either representation (materialized for scatterers).
  SampledSymbol symbol_samples() const;

 private:
  KNOperator(TimeGrid g) : signal_grid_(g) {}

  TimeGrid signal_grid_;
  std::optional<SampledSymbol> symbol_;
  std::optional<SampledSymbol> spreading_;
  Box band_{};
  std::vector<Scatterer> shifts_;
};

enum class Smoothness { white, smooth };

/// Seeded random spreading on the grid points of band_box (complex normal, scaled so the symbol
/// is O(1)); `smooth` tapers it with a separable quintic bump that vanishes on the box edge.
/// Throws DomainError when band_box reaches past the spreading grid's Nyquist range.
KNOperator synth_bandlimited(const TimeGrid& signal_grid, Box band_box, std::uint64_t seed,
                             Smoothness smoothness);

/// amplitude * M_nu T_{-tau}: spreading delta at (eta = nu, u = tau).
KNOperator point_scatterer(const TimeGrid& signal_grid, cplx amplitude, double tau, double nu);

/// Riemann sum over the spreading support of sigma^(eta, u) M_eta T_{-u} f (weight deta du), or
/// the exact finite sum for scatterer operators. Parallel over output samples.
SampledSignal apply_spreading(const KNOperator& op, const SampledSignal& f);

/// sigma^KN f(x) = df * sum_xi sigma(x, xi) exp(2 pi i x xi) f^(xi). Parallel over x.
SampledSignal apply_symbol(const KNOperator& op, const SampledSignal& f);

/// <sigma, R(g, f)> as a plane quadrature; equals <sigma^KN f, g>.
cplx kn_bilinear(const KNOperator& op, const SampledSignal& f, const SampledSignal& g);

/// Fraction of spreading energy outside `box` (scatterers count by |amplitude|^2).
double band_violation(const KNOperator& op, const Box& box);

namespace io {
/// Writes <stem>.json metadata (band_box, exact_shifts, spreading file) plus spreading samples.
void save_operator(const KNOperator& op, const std::filesystem::path& stem);
KNOperator load_operator(const std::filesystem::path& header_path);
}  // namespace io

}  // namespace tfchan
