#include "tfchan/tf.hpp"

#include <cmath>
#include <sstream>

#include "tfchan/error.hpp"
#include "tfchan/fourier.hpp"

namespace tfchan {

GridShift resolve_shift(const TimeGrid& grid, PhasePoint z) {
  const auto t = grid.aligned_offset(z.x);
  const TimeGrid freq = grid.dual();
  const auto f = freq.aligned_offset(z.xi);
  if (!t) {
    const double nearest = std::round(z.x / grid.step()) * grid.step();
    std::ostringstream msg;
    msg << "time shift x=" << z.x << " is not a multiple of dt=" << grid.step()
        << "; nearest representable x=" << nearest;
    throw OffGrid(msg.str(), nearest);
  }
  if (!f) {
    const double nearest = std::round(z.xi / freq.step()) * freq.step();
    std::ostringstream msg;
    msg << "frequency shift xi=" << z.xi << " is not a multiple of df=" << freq.step()
        << "; nearest representable xi=" << nearest;
    throw OffGrid(msg.str(), nearest);
  }
  return {*t, *f};
}

std::string to_string(WindowKind k) {
  switch (k) {
    case WindowKind::gaussian: return "gaussian";
    case WindowKind::rectangular: return "rectangular";
    case WindowKind::custom: return "custom";
  }
  return "custom";
}

namespace {

void require_nonzero(const SampledSignal& s) {
  if (!(s.norm() > 0.0)) throw DomainError("window must be non-zero");
}

}  // namespace

Window gaussian_window(const TimeGrid& grid) {
  auto s = sample_function(grid, [](double t) { return cplx(std::exp(-kPi * t * t), 0.0); });
  return Window{WindowKind::gaussian, std::move(s), true, true, false};
}

Window rectangular_window(const TimeGrid& grid, double alpha, double beta) {
  if (!(beta > alpha)) throw DomainError("rectangular_window: need alpha < beta");
  const double tol = 1e-9 * grid.step();
  auto s = sample_function(grid, [&](double t) {
    if (std::abs(t - alpha) <= tol || std::abs(t - beta) <= tol) return cplx(0.5, 0.0);
    return (t > alpha && t < beta) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
  });
  require_nonzero(s);
  return Window{WindowKind::rectangular, std::move(s), false, false, false};
}

Window basis_window(const TimeGrid& grid, double a) {
  if (!grid.aligned_offset(a) || a <= 0.0) {
    throw OffGrid("basis_window: a must be a positive multiple of dt",
                  std::max(1.0, std::round(a / grid.step())) * grid.step());
  }
  const double tol = 1e-9 * grid.step();
  const double height = 1.0 / std::sqrt(a);
  auto s = sample_function(grid, [&](double t) {
    return (t > -tol && t < a - tol) ? cplx(height, 0.0) : cplx(0.0, 0.0);
  });
  return Window{WindowKind::rectangular, std::move(s), false, false, true};
}

Window custom_window(SampledSignal signal) {
  if (signal.domain != SignalDomain::time) throw DomainError("window must be a time signal");
  require_nonzero(signal);
  return Window{WindowKind::custom, std::move(signal), false, false, false};
}

SampledSignal tf_shift(const SampledSignal& f, PhasePoint z) {
  return tf_shift(f, resolve_shift(f.grid, z));
}

SampledSignal tf_shift(const SampledSignal& f, GridShift z) {
  const std::size_t n = f.size();
  const UnitRoots roots(n);
  SampledSignal out(f.grid, f.domain);
  for (std::size_t k = 0; k < n; ++k) {
    // xi t_k = z.freq * df * (k - n/2) * dt = z.freq * (k - n/2) / n
    const cplx phase = roots(z.freq * f.grid.offset(k));
    out[k] = phase * f[f.grid.wrap(f.grid.offset(k) - z.time)];
  }
  return out;
}

SampledSymbol stft(const SampledSignal& f, const Window& g) { return stft(f, g.signal); }

SampledSymbol stft(const SampledSignal& f, const SampledSignal& g) {
  if (f.grid != g.grid) throw GridMismatch("stft: signal and window live on different grids");
  if (!(g.norm() > 0.0)) throw DomainError("stft: zero window");
  const TimeGrid& grid = f.grid;
  const std::size_t n = grid.size();
  SampledSymbol out(symbol_plane(grid), SymbolDomain::symbol);
  const double dt = grid.step();
#pragma omp parallel
  {
    std::vector<cplx> column(n);
#pragma omp for schedule(static)
    for (long i = 0; i < static_cast<long>(n); ++i) {
      const long shift = grid.offset(static_cast<std::size_t>(i));
      for (std::size_t k = 0; k < n; ++k) {
        column[k] = f[k] * std::conj(g[grid.wrap(grid.offset(k) - shift)]);
      }
      detail::centered_dft(column.data(), n, Direction::forward, dt);
      std::copy(column.begin(), column.end(),
                out.values.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(i) * n));
    }
  }
  return out;
}

SampledSymbol rihaczek(const SampledSignal& f, const SampledSignal& g) {
  if (f.grid != g.grid) throw GridMismatch("rihaczek: signals live on different grids");
  const auto ghat = fourier(g, Direction::forward);
  const TimeGrid& grid = f.grid;
  const std::size_t n = grid.size();
  const UnitRoots roots(n);
  SampledSymbol out(symbol_plane(grid), SymbolDomain::symbol);
  for (std::size_t i = 0; i < n; ++i) {
    const long xi_off = grid.offset(i);
    for (std::size_t m = 0; m < n; ++m) {
      // x xi = (i - n/2)(m - n/2) / n
      out.at(i, m) = f[i] * std::conj(ghat[m]) * roots(-xi_off * grid.offset(m));
    }
  }
  return out;
}

SampledSymbol u_swap(const SampledSymbol& f) {
  if (!f.grid.square()) throw GridMismatch("u_swap: plane grid must be square");
  const std::size_t n = f.rows();
  SampledSymbol out(f.grid, f.domain == SymbolDomain::symbol ? SymbolDomain::spreading
                                                             : SymbolDomain::symbol);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) = f.at(f.grid.axis1.negate(j), i);
  }
  return out;
}

SampledSymbol star_involution(const SampledSymbol& f) {
  SampledSymbol out(f.grid, f.domain);
  for (std::size_t i = 0; i < f.rows(); ++i) {
    const std::size_t ni = f.grid.axis1.negate(i);
    for (std::size_t j = 0; j < f.cols(); ++j) {
      out.at(i, j) = std::conj(f.at(ni, f.grid.axis2.negate(j)));
    }
  }
  if (f.support_box) out.support_box = f.support_box;
  return out;
}

cplx gaussian_stft(double x, double xi) {
  return std::exp(cplx(-0.5 * kPi * (x * x + xi * xi), -kPi * x * xi)) / std::sqrt(2.0);
}

cplx gaussian_ambiguity(double eta, double u) { return gaussian_stft(-u, eta); }

}  // namespace tfchan
