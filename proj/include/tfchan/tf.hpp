#pragma once

#include <string>

#include "tfchan/grid.hpp"

namespace tfchan {

/// Phase-space point z = (x, xi): time x, frequency xi.
struct PhasePoint {
  double x = 0.0;
  double xi = 0.0;
};

/// A phase-space point resolved to integer grid offsets (time steps, frequency steps).
struct GridShift {
  long time = 0;
  long freq = 0;
  bool operator==(const GridShift&) const = default;
};

/// Resolves z onto the grid; throws OffGrid naming the nearest representable coordinate.
GridShift resolve_shift(const TimeGrid& grid, PhasePoint z);

enum class WindowKind { gaussian, rectangular, custom };

std::string to_string(WindowKind k);

struct Window {
  WindowKind kind = WindowKind::custom;
  SampledSignal signal;
  bool schwartz_class = false;
  bool closed_form_stft_available = false;
  /// True for windows built as an orthonormal Gabor basis generator.
  bool basis_generator = false;
};

/// phi(t) = exp(-pi t^2).
Window gaussian_window(const TimeGrid& grid);
/// Indicator of [alpha, beta]: 1 at interior samples, 1/2 at samples on an endpoint.
Window rectangular_window(const TimeGrid& grid, double alpha, double beta);
/// a^(-1/2) times the indicator of the half-open [0, a); together with b = 1/a its lattice
/// shifts form an orthonormal basis of the periodic grid.
Window basis_window(const TimeGrid& grid, double a);
/// Wraps an arbitrary non-zero signal.
Window custom_window(SampledSignal signal);

/// pi(z) f(t) = exp(2 pi i xi t) f(t - x), translation taken on the periodic grid.
SampledSignal tf_shift(const SampledSignal& f, PhasePoint z);
SampledSignal tf_shift(const SampledSignal& f, GridShift z);

/// V_g f(x, xi) = dt * sum_t f(t) conj(g(t - x)) exp(-2 pi i xi t) on symbol_plane(grid).
/// One FFT per x column; columns are computed in parallel.
SampledSymbol stft(const SampledSignal& f, const Window& g);
SampledSymbol stft(const SampledSignal& f, const SampledSignal& g);

/// R(f, g)(x, xi) = f(x) conj(g^(xi)) exp(-2 pi i x xi).
SampledSymbol rihaczek(const SampledSignal& f, const SampledSignal& g);

/// (U F)(xi, x) = F(-x, xi). Requires a square plane; toggles the symbol/spreading tag.
SampledSymbol u_swap(const SampledSymbol& f);

/// F*(z) = conj(F(-z)).
SampledSymbol star_involution(const SampledSymbol& f);

/// Closed-form STFT of the Gaussian with itself:
/// V_phi phi(x, xi) = 2^(-1/2) exp(-pi i x xi) exp(-pi (x^2 + xi^2) / 2).
cplx gaussian_stft(double x, double xi);
/// G(eta, u) = (U V_phi phi)(eta, u) = 2^(-1/2) exp(-pi/2 eta^2 - pi/2 u^2 + pi i eta u).
cplx gaussian_ambiguity(double eta, double u);

}  // namespace tfchan
