#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tfchan {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Uniform grid of n samples centered on the origin: t_k = (k - n/2) * dt, dt = period / n.
/// The same type describes frequency axes; dual() maps a time axis to its frequency axis.
class TimeGrid {
 public:
  TimeGrid(std::size_t n_samples, double period);

  std::size_t size() const { return n_; }
  double period() const { return period_; }
  double step() const { return period_ / static_cast<double>(n_); }
  /// Step of the dual axis, 1 / period.
  double dual_step() const { return 1.0 / period_; }
  double point(std::size_t k) const {
    return (static_cast<double>(k) - static_cast<double>(n_ / 2)) * step();
  }
  /// Signed offset from the origin index, k - n/2.
  long offset(std::size_t k) const { return static_cast<long>(k) - static_cast<long>(n_ / 2); }
  /// Index of the sample with signed offset s (periodic).
  std::size_t wrap(long s) const;
  /// Index of -t_k on the periodic grid.
  std::size_t negate(std::size_t k) const { return (n_ - k) % n_; }
  /// Integer offset m with m * step() == t, or nullopt when t is off-grid.
  std::optional<long> aligned_offset(double t) const;
  /// The frequency axis paired with this axis by the FFT: n samples, period n / period.
  TimeGrid dual() const { return TimeGrid(n_, static_cast<double>(n_) / period_); }

  bool operator==(const TimeGrid& o) const;
  bool operator!=(const TimeGrid& o) const { return !(*this == o); }

 private:
  std::size_t n_;
  double period_;
};

/// Tensor product of two axes; row-major storage with axis1 as the slow index.
struct PlaneGrid {
  TimeGrid axis1;
  TimeGrid axis2;

  std::size_t size() const { return axis1.size() * axis2.size(); }
  double cell() const { return axis1.step() * axis2.step(); }
  std::size_t index(std::size_t i, std::size_t j) const { return i * axis2.size() + j; }
  PlaneGrid dual() const { return {axis1.dual(), axis2.dual()}; }
  bool square() const { return axis1 == axis2; }
  bool operator==(const PlaneGrid& o) const { return axis1 == o.axis1 && axis2 == o.axis2; }
  bool operator!=(const PlaneGrid& o) const { return !(*this == o); }
};

/// Phase-space plane carrying a symbol sigma(x, xi) for signals on `signal`.
PlaneGrid symbol_plane(const TimeGrid& signal);
/// Plane carrying the spreading function (eta, u) for signals on `signal`.
PlaneGrid spreading_plane(const TimeGrid& signal);

enum class SignalDomain { time, frequency };
enum class SymbolDomain { symbol, spreading };

std::string to_string(SignalDomain d);
std::string to_string(SymbolDomain d);
SignalDomain signal_domain_from_string(const std::string& s);
SymbolDomain symbol_domain_from_string(const std::string& s);

/// Centered rectangle [-half1, half1] x [-half2, half2].
struct Box {
  double half1 = 0.0;
  double half2 = 0.0;

  /// Membership with a tolerance of `slack` grid units (absolute).
  bool contains(double p, double q, double slack = 1e-9) const {
    return p >= -half1 - slack && p <= half1 + slack && q >= -half2 - slack &&
           q <= half2 + slack;
  }
  bool operator==(const Box& o) const { return half1 == o.half1 && half2 == o.half2; }
};

struct SampledSignal {
  TimeGrid grid;
  std::vector<cplx> values;
  SignalDomain domain = SignalDomain::time;

  SampledSignal(TimeGrid g, SignalDomain d = SignalDomain::time);
  SampledSignal(TimeGrid g, std::vector<cplx> v, SignalDomain d = SignalDomain::time);

  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t k) { return values[k]; }
  const cplx& operator[](std::size_t k) const { return values[k]; }

  /// sqrt(dt * sum |f_k|^2).
  double norm() const;
};

struct SampledSymbol {
  PlaneGrid grid;
  std::vector<cplx> values;
  SymbolDomain domain = SymbolDomain::symbol;
  std::optional<Box> support_box;

  SampledSymbol(PlaneGrid g, SymbolDomain d = SymbolDomain::symbol);
  SampledSymbol(PlaneGrid g, std::vector<cplx> v, SymbolDomain d = SymbolDomain::symbol);

  std::size_t rows() const { return grid.axis1.size(); }
  std::size_t cols() const { return grid.axis2.size(); }
  cplx& at(std::size_t i, std::size_t j) { return values[grid.index(i, j)]; }
  const cplx& at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }

  double norm() const;
  /// Largest modulus of any sample outside support_box (0 when no box is set).
  double max_outside_support() const;
};

/// dt * sum f_k conj(g_k).
cplx inner(const SampledSignal& f, const SampledSignal& g);
/// cell * sum F conj(G).
cplx inner(const SampledSymbol& f, const SampledSymbol& g);

/// Relative L2 distance ||a - b|| / ||b|| (absolute when b is zero).
double relative_error(const std::vector<cplx>& a, const std::vector<cplx>& b);
double max_abs(const std::vector<cplx>& v);
double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b);

SampledSignal sample_function(const TimeGrid& grid, const std::function<cplx(double)>& f,
                              SignalDomain domain = SignalDomain::time);
SampledSymbol sample_function(const PlaneGrid& grid,
                              const std::function<cplx(double, double)>& f,
                              SymbolDomain domain = SymbolDomain::symbol);

/// Table of the n-th roots of unity, root(r) = exp(2 pi i r / n) for any integer r.
class UnitRoots {
 public:
  explicit UnitRoots(std::size_t n);
  cplx operator()(long r) const;
  std::size_t size() const { return table_.size(); }

 private:
  std::vector<cplx> table_;
};

}  // namespace tfchan
