#include "tfchan/uniqueness.hpp"

#include <Eigen/SVD>
#include <sstream>

#include "tfchan/error.hpp"

namespace tfchan {

namespace {

constexpr double kSizeLimit = 1e5;

// M_eta T_{-u} f with eta = e df, u = v dt.
GridShift as_tf_shift(const GridShift& spreading_point) {
  return {-spreading_point.freq, spreading_point.time};
}

}  // namespace

SymbolToMatrixMap assemble_map(const Window& g, const GaborLattice& lattice, Box band_box) {
  if (g.signal.grid != lattice.grid()) throw GridMismatch("assemble_map: window grid differs");
  const PlaneGrid plane = spreading_plane(lattice.grid());
  std::vector<GridShift> basis;
  for (std::size_t i = 0; i < plane.axis1.size(); ++i) {
    for (std::size_t j = 0; j < plane.axis2.size(); ++j) {
      if (band_box.contains(plane.axis1.point(i), plane.axis2.point(j),
                            1e-9 * plane.axis1.step())) {
        // time = eta offset, freq = u offset (storage only).
        basis.push_back({plane.axis1.offset(i), plane.axis2.offset(j)});
      }
    }
  }
  const double p = static_cast<double>(basis.size());
  const double m = static_cast<double>(lattice.size());
  if (basis.empty()) throw DomainError("assemble_map: band box contains no grid point");
  if (p > kSizeLimit || m * m > kSizeLimit) {
    std::ostringstream msg;
    msg << "assemble_map: size guard exceeded (P = " << p << ", M^2 = " << m * m
        << ", limit 1e5)";
    throw DomainError(msg.str());
  }

  const auto phi = atom_matrix(g, lattice);
  const Eigen::Index n = phi.rows(), mm = phi.cols();
  const TimeGrid& grid = lattice.grid();
  const UnitRoots roots(grid.size());
  Eigen::MatrixXcd a(mm * mm, static_cast<Eigen::Index>(basis.size()));
  const Eigen::MatrixXcd phi_h = phi.adjoint();

#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < static_cast<long>(basis.size()); ++c) {
    const GridShift s = as_tf_shift(basis[static_cast<std::size_t>(c)]);
    Eigen::MatrixXcd shifted(n, mm);
    for (Eigen::Index k = 0; k < n; ++k) {
      const long off = grid.offset(static_cast<std::size_t>(k));
      const auto src = static_cast<Eigen::Index>(grid.wrap(off - s.time));
      shifted.row(k) = roots(s.freq * off) * phi.row(src);
    }
    const Eigen::MatrixXcd h = grid.step() * (phi_h * shifted);
    for (Eigen::Index i = 0; i < mm; ++i) {
      for (Eigen::Index j = 0; j < mm; ++j) a(i * mm + j, c) = h(i, j);
    }
  }

  std::vector<Eigen::Index> off;
  off.reserve(static_cast<std::size_t>(mm * mm - mm));
  for (Eigen::Index i = 0; i < mm; ++i) {
    for (Eigen::Index j = 0; j < mm; ++j) {
      if (i != j) off.push_back(i * mm + j);
    }
  }
  return SymbolToMatrixMap{std::move(basis), lattice, g, band_box, std::move(a), std::move(off)};
}

KNOperator basis_operator(const SymbolToMatrixMap& map, std::size_t p) {
  const TimeGrid& grid = map.lattice.grid();
  const GridShift& b = map.basis.at(p);
  return KNOperator::from_scatterers(
      grid, {Scatterer{cplx(1.0, 0.0), static_cast<double>(b.time) * grid.dual_step(),
                       static_cast<double>(b.freq) * grid.step()}});
}

Eigen::VectorXcd coefficients_of(const SymbolToMatrixMap& map, const KNOperator& op) {
  const TimeGrid& grid = map.lattice.grid();
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(map.basis.size()));
  if (op.has_samples()) {
    const auto& sp = op.spreading();
    const double cell = sp.grid.cell();
    for (std::size_t p = 0; p < map.basis.size(); ++p) {
      const auto& b = map.basis[p];
      x(static_cast<Eigen::Index>(p)) = cell * sp.at(sp.grid.axis1.wrap(b.time), sp.grid.axis2.wrap(b.freq));
    }
    return x;
  }
  for (const auto& s : op.exact_shifts()) {
    const auto e = grid.dual().aligned_offset(s.eta);
    const auto v = grid.aligned_offset(s.u);
    if (!e || !v) throw OffGrid("coefficients_of: scatterer off the spreading grid", 0.0);
    for (std::size_t p = 0; p < map.basis.size(); ++p) {
      if (map.basis[p].time == *e && map.basis[p].freq == *v) {
        x(static_cast<Eigen::Index>(p)) += s.amplitude;
      }
    }
  }
  return x;
}

Eigen::VectorXcd vec(const Eigen::MatrixXcd& h) {
  const Eigen::Index m = h.rows();
  Eigen::VectorXcd v(h.rows() * h.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) v(i * h.cols() + j) = h(i, j);
  }
  return v;
}

Eigen::VectorXcd offdiag(const SymbolToMatrixMap& map, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(map.offdiag_rows.size()));
  for (std::size_t r = 0; r < map.offdiag_rows.size(); ++r) {
    out(static_cast<Eigen::Index>(r)) = v(map.offdiag_rows[r]);
  }
  return out;
}

SvdSummary singular_range(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return {};
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  const auto& s = svd.singularValues();
  SvdSummary out{s.minCoeff(), s.maxCoeff()};
  // A wide matrix has a nontrivial kernel.
  if (a.rows() < a.cols()) out.sigma_min = 0.0;
  return out;
}

SvdSummary full_injectivity_svd(const SymbolToMatrixMap& map) {
  return singular_range(map.matrix_A);
}

SvdSummary offdiag_svd(const SymbolToMatrixMap& map) {
  Eigen::MatrixXcd rows(static_cast<Eigen::Index>(map.offdiag_rows.size()), map.matrix_A.cols());
  for (std::size_t r = 0; r < map.offdiag_rows.size(); ++r) {
    rows.row(static_cast<Eigen::Index>(r)) = map.matrix_A.row(map.offdiag_rows[r]);
  }
  return singular_range(rows);
}

ObstructionReport diagonal_obstruction_svd(const SymbolToMatrixMap& map) {
  const auto& lat = map.lattice;
  if (!(lat.ab() < 1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "diagonal_obstruction_svd: needs ab < 1 (got ab = " << lat.ab() << ")";
    throw FramePreconditionUnmet(msg.str(), 0.0);
  }
  const auto full = build_full_lattice(lat.grid(), lat.a(), lat.b());
  const auto fb = frame_bounds(map.window, full);
  if (!(fb.lower > 0.1 * fb.upper)) {
    std::ostringstream msg;
    msg << "diagonal_obstruction_svd: frame hypothesis unmet, A_est = " << fb.lower
        << " <= 0.1 B_est = " << 0.1 * fb.upper;
    throw FramePreconditionUnmet(msg.str(), fb.lower);
  }
  return ObstructionReport{offdiag_svd(map), fb.lower, fb.upper};
}

Eigen::VectorXcd solve_coefficients(const SymbolToMatrixMap& map, const Eigen::MatrixXcd& h) {
  const Eigen::VectorXcd y = vec(h);
  if (y.size() != map.matrix_A.rows()) throw GridMismatch("solve_coefficients: H size mismatch");
  return map.matrix_A.colPivHouseholderQr().solve(y);
}

nlohmann::json uniqueness_report(const SymbolToMatrixMap& map, const SvdSummary& full,
                                 const ObstructionReport* obstruction) {
  const auto& lat = map.lattice;
  nlohmann::json j;
  j["window"] = to_string(map.window.kind);
  j["grid"] = {{"n", lat.grid().size()}, {"period", lat.grid().period()}};
  j["a"] = lat.a();
  j["b"] = lat.b();
  j["ab"] = lat.ab();
  j["band_box"] = {map.band_box.half1, map.band_box.half2};
  j["band_points"] = map.basis.size();
  j["truncation"] = {lat.k1(), lat.k2()};
  j["lattice_points"] = lat.size();
  j["sigma_min"] = full.sigma_min;
  j["sigma_max"] = full.sigma_max;
  j["sigma_ratio"] = full.ratio();
  if (obstruction) {
    j["sigma_min_offdiag"] = obstruction->offdiag.sigma_min;
    j["sigma_max_offdiag"] = obstruction->offdiag.sigma_max;
    j["A_est"] = obstruction->A_est;
    j["B_est"] = obstruction->B_est;
  } else {
    j["sigma_min_offdiag"] = nullptr;
    j["A_est"] = nullptr;
    j["B_est"] = nullptr;
  }
  return j;
}

}  // namespace tfchan
