#include "tfchan/reference.hpp"

#include "tfchan/error.hpp"
#include "tfchan/fourier.hpp"

namespace tfchan::reference {

SampledSignal dft_direct(const SampledSignal& f) {
  const TimeGrid& grid = f.grid;
  const std::size_t n = grid.size();
  const UnitRoots roots(n);
  SampledSignal out(grid.dual(), SignalDomain::frequency);
  for (std::size_t m = 0; m < n; ++m) {
    cplx acc{};
    for (std::size_t k = 0; k < n; ++k) acc += f[k] * roots(-grid.offset(m) * grid.offset(k));
    out[m] = grid.step() * acc;
  }
  return out;
}

SampledSymbol stft_direct(const SampledSignal& f, const SampledSignal& g) {
  if (f.grid != g.grid) throw GridMismatch("stft_direct: grid mismatch");
  const TimeGrid& grid = f.grid;
  const std::size_t n = grid.size();
  const UnitRoots roots(n);
  SampledSymbol out(symbol_plane(grid));
  for (std::size_t i = 0; i < n; ++i) {
    const long x = grid.offset(i);
    for (std::size_t m = 0; m < n; ++m) {
      const long xi = grid.offset(m);
      cplx acc{};
      for (std::size_t k = 0; k < n; ++k) {
        const long t = grid.offset(k);
        acc += f[k] * std::conj(g[grid.wrap(t - x)]) * roots(-xi * t);
      }
      out.at(i, m) = grid.step() * acc;
    }
  }
  return out;
}

SampledSignal apply_spreading(const KNOperator& op, const SampledSignal& f) {
  if (f.grid != op.signal_grid()) throw GridMismatch("apply_spreading: grid mismatch");
  const TimeGrid& grid = f.grid;
  const std::size_t n = grid.size();
  const UnitRoots roots(n);
  SampledSignal out(grid);
  if (!op.has_samples()) {
    for (const auto& s : op.exact_shifts()) {
      const auto z = resolve_shift(grid, PhasePoint{-s.u, s.eta});
      for (std::size_t k = 0; k < n; ++k) {
        const long x = grid.offset(k);
        out[k] += s.amplitude * roots(z.freq * x) * f[grid.wrap(x - z.time)];
      }
    }
    return out;
  }
  const auto& sp = op.spreading();
  const double cell = sp.grid.cell();
  for (std::size_t i = 0; i < sp.rows(); ++i) {
    const long eta = sp.grid.axis1.offset(i);
    for (std::size_t j = 0; j < sp.cols(); ++j) {
      const cplx v = sp.at(i, j);
      if (v == cplx{}) continue;
      const long u = sp.grid.axis2.offset(j);
      for (std::size_t k = 0; k < n; ++k) {
        const long x = grid.offset(k);
        out[k] += v * cell * roots(eta * x) * f[grid.wrap(x + u)];
      }
    }
  }
  return out;
}

SampledSignal apply_symbol(const KNOperator& op, const SampledSignal& f) {
  if (f.grid != op.signal_grid()) throw GridMismatch("apply_symbol: grid mismatch");
  const auto sigma = op.symbol_samples();
  const auto fhat = dft_direct(f);
  const TimeGrid& grid = f.grid;
  const std::size_t n = grid.size();
  const UnitRoots roots(n);
  SampledSignal out(grid);
  for (std::size_t i = 0; i < n; ++i) {
    const long x = grid.offset(i);
    cplx acc{};
    for (std::size_t m = 0; m < n; ++m) acc += sigma.at(i, m) * roots(x * grid.offset(m)) * fhat[m];
    out[i] = grid.dual_step() * acc;
  }
  return out;
}

Eigen::MatrixXcd channel_matrix(const KNOperator& op, const Window& g, const GaborLattice& lattice) {
  const auto m = static_cast<Eigen::Index>(lattice.size());
  std::vector<SampledSignal> atoms, responses;
  for (const auto& p : lattice.points()) {
    atoms.push_back(gabor_atom(g, lattice, p));
    responses.push_back(reference::apply_spreading(op, atoms.back()));
  }
  Eigen::MatrixXcd h(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      h(i, j) = inner(responses[static_cast<std::size_t>(j)], atoms[static_cast<std::size_t>(i)]);
    }
  }
  return h;
}

Eigen::MatrixXcd channel_matrix_bilinear(const KNOperator& op, const Window& g,
                                         const GaborLattice& lattice) {
  const auto m = static_cast<Eigen::Index>(lattice.size());
  const auto sigma = op.symbol_samples();
  std::vector<SampledSignal> atoms;
  for (const auto& p : lattice.points()) atoms.push_back(gabor_atom(g, lattice, p));
  Eigen::MatrixXcd h(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      h(i, j) = inner(sigma, rihaczek(atoms[static_cast<std::size_t>(i)],
                                      atoms[static_cast<std::size_t>(j)]));
    }
  }
  return h;
}

SampledSymbol reconstruct_time(const std::vector<cplx>& diag, const GaborLattice& lattice,
                               const ReconstructionKernel& kernel) {
  if (!kernel.calibration_constant) throw DomainError("reconstruct_time: kernel is not calibrated");
  const auto k_sym = kernel_in_symbol_domain(kernel);
  const PlaneGrid& plane = k_sym.grid;
  SampledSymbol out(plane);
  for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
    if (diag[idx] == cplx{}) continue;
    const auto s = lattice.shift(idx);
    for (std::size_t i = 0; i < plane.axis1.size(); ++i) {
      const std::size_t si = plane.axis1.wrap(plane.axis1.offset(i) - s.time);
      for (std::size_t m = 0; m < plane.axis2.size(); ++m) {
        out.at(i, m) += diag[idx] * k_sym.at(si, plane.axis2.wrap(plane.axis2.offset(m) - s.freq));
      }
    }
  }
  for (auto& v : out.values) v *= *kernel.calibration_constant;
  return out;
}

}  // namespace tfchan::reference
