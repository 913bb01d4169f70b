#include "tfchan/grid.hpp"

#include <cmath>
#include <sstream>

#include "tfchan/error.hpp"

namespace tfchan {

TimeGrid::TimeGrid(std::size_t n_samples, double period) : n_(n_samples), period_(period) {
  if (n_samples < 2 || n_samples % 2 != 0) {
    throw DomainError("TimeGrid: n_samples must be even and >= 2, got " +
                      std::to_string(n_samples));
  }
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw DomainError("TimeGrid: period must be positive and finite");
  }
}

std::size_t TimeGrid::wrap(long s) const {
  const long n = static_cast<long>(n_);
  long k = (s + n / 2) % n;
  if (k < 0) k += n;
  return static_cast<std::size_t>(k);
}

std::optional<long> TimeGrid::aligned_offset(double t) const {
  const double r = t / step();
  const double m = std::round(r);
  if (std::abs(r - m) > 1e-9 * std::max(1.0, std::abs(r))) return std::nullopt;
  return static_cast<long>(m);
}

bool TimeGrid::operator==(const TimeGrid& o) const {
  return n_ == o.n_ && std::abs(period_ - o.period_) <= 1e-12 * std::max(period_, o.period_);
}

PlaneGrid symbol_plane(const TimeGrid& signal) { return {signal, signal.dual()}; }
PlaneGrid spreading_plane(const TimeGrid& signal) { return symbol_plane(signal).dual(); }

std::string to_string(SignalDomain d) { return d == SignalDomain::time ? "time" : "frequency"; }
std::string to_string(SymbolDomain d) { return d == SymbolDomain::symbol ? "symbol" : "spreading"; }

SignalDomain signal_domain_from_string(const std::string& s) {
  if (s == "time") return SignalDomain::time;
  if (s == "frequency") return SignalDomain::frequency;
  throw DomainError("unknown signal domain tag '" + s + "'");
}

SymbolDomain symbol_domain_from_string(const std::string& s) {
  if (s == "symbol") return SymbolDomain::symbol;
  if (s == "spreading") return SymbolDomain::spreading;
  throw DomainError("unknown symbol domain tag '" + s + "'");
}

SampledSignal::SampledSignal(TimeGrid g, SignalDomain d)
    : grid(g), values(g.size(), cplx{}), domain(d) {}

SampledSignal::SampledSignal(TimeGrid g, std::vector<cplx> v, SignalDomain d)
    : grid(g), values(std::move(v)), domain(d) {
  if (values.size() != grid.size()) {
    throw GridMismatch("SampledSignal: " + std::to_string(values.size()) +
                       " values for a grid of " + std::to_string(grid.size()));
  }
}

double SampledSignal::norm() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(grid.step() * s);
}

SampledSymbol::SampledSymbol(PlaneGrid g, SymbolDomain d)
    : grid(g), values(g.size(), cplx{}), domain(d) {}

SampledSymbol::SampledSymbol(PlaneGrid g, std::vector<cplx> v, SymbolDomain d)
    : grid(g), values(std::move(v)), domain(d) {
  if (values.size() != grid.size()) {
    throw GridMismatch("SampledSymbol: " + std::to_string(values.size()) +
                       " values for a plane of " + std::to_string(grid.size()));
  }
}

double SampledSymbol::norm() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(grid.cell() * s);
}

double SampledSymbol::max_outside_support() const {
  if (!support_box) return 0.0;
  double m = 0.0;
  const double slack = 1e-9 * std::max(grid.axis1.step(), grid.axis2.step());
  for (std::size_t i = 0; i < rows(); ++i) {
    const double p = grid.axis1.point(i);
    for (std::size_t j = 0; j < cols(); ++j) {
      if (!support_box->contains(p, grid.axis2.point(j), slack)) {
        m = std::max(m, std::abs(at(i, j)));
      }
    }
  }
  return m;
}

cplx inner(const SampledSignal& f, const SampledSignal& g) {
  if (f.grid != g.grid) throw GridMismatch("inner: signals live on different grids");
  cplx s{};
  for (std::size_t k = 0; k < f.size(); ++k) s += f[k] * std::conj(g[k]);
  return s * f.grid.step();
}

cplx inner(const SampledSymbol& f, const SampledSymbol& g) {
  if (f.grid != g.grid) throw GridMismatch("inner: symbols live on different planes");
  cplx s{};
  for (std::size_t k = 0; k < f.values.size(); ++k) s += f.values[k] * std::conj(g.values[k]);
  return s * f.grid.cell();
}

double relative_error(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) throw GridMismatch("relative_error: size mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    num += std::norm(a[k] - b[k]);
    den += std::norm(b[k]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size()) throw GridMismatch("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

SampledSignal sample_function(const TimeGrid& grid, const std::function<cplx(double)>& f,
                              SignalDomain domain) {
  SampledSignal out(grid, domain);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid.point(k);
    const cplx v = f(t);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "sample_function: non-finite value at t=" << t << " (index " << k << ")";
      throw DomainError(msg.str());
    }
    out[k] = v;
  }
  return out;
}

SampledSymbol sample_function(const PlaneGrid& grid,
                              const std::function<cplx(double, double)>& f,
                              SymbolDomain domain) {
  SampledSymbol out(grid, domain);
  for (std::size_t i = 0; i < grid.axis1.size(); ++i) {
    const double p = grid.axis1.point(i);
    for (std::size_t j = 0; j < grid.axis2.size(); ++j) {
      const double q = grid.axis2.point(j);
      const cplx v = f(p, q);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        std::ostringstream msg;
        msg << "sample_function: non-finite value at (" << p << ", " << q << ")";
        throw DomainError(msg.str());
      }
      out.at(i, j) = v;
    }
  }
  return out;
}

UnitRoots::UnitRoots(std::size_t n) : table_(n) {
  for (std::size_t r = 0; r < n; ++r) {
    const double th = 2.0 * kPi * static_cast<double>(r) / static_cast<double>(n);
    table_[r] = {std::cos(th), std::sin(th)};
  }
}

cplx UnitRoots::operator()(long r) const {
  const long n = static_cast<long>(table_.size());
  long k = r % n;
  if (k < 0) k += n;
  return table_[static_cast<std::size_t>(k)];
}

}  // namespace tfchan
