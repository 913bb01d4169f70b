#pragma once

#include <Eigen/Dense>
#include <vector>

#include "json.hpp"
#include "tfchan/gabor.hpp"
#include "tfchan/grid.hpp"
#include "tfchan/psido.hpp"
#include "tfchan/tf.hpp"

namespace tfchan {

/// Linear map from spreading coefficients on the band points to vec(H), vec index i * M + j.
///
/// Coefficient p is the mass sigma^(eta_p, u_p) deta du, so column p is vec(H) for the exact
/// shift M_eta T_{-u}.
struct SymbolToMatrixMap {
  /// Band points as (eta offset, u offset) on the spreading plane.
  std::vector<GridShift> basis;
  GaborLattice lattice;
  Window window;
  Box band_box;
  Eigen::MatrixXcd matrix_A;
  std::vector<Eigen::Index> offdiag_rows;
};

/// Throws DomainError when the band is empty or P or M^2 exceeds 1e5.
SymbolToMatrixMap assemble_map(const Window& g, const GaborLattice& lattice, Box band_box);

/// Unit-mass operator for basis point p.
KNOperator basis_operator(const SymbolToMatrixMap& map, std::size_t p);

/// Spreading masses of `op` at the basis points.
Eigen::VectorXcd coefficients_of(const SymbolToMatrixMap& map, const KNOperator& op);

Eigen::VectorXcd vec(const Eigen::MatrixXcd& h);
Eigen::VectorXcd offdiag(const SymbolToMatrixMap& map, const Eigen::VectorXcd& v);

struct SvdSummary {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double ratio() const { return sigma_max > 0.0 ? sigma_min / sigma_max : 0.0; }
};

SvdSummary singular_range(const Eigen::MatrixXcd& a);
SvdSummary full_injectivity_svd(const SymbolToMatrixMap& map);
/// Extremal singular values of the off-diagonal rows, without precondition checks.
SvdSummary offdiag_svd(const SymbolToMatrixMap& map);

struct ObstructionReport {
  SvdSummary offdiag;
  double A_est = 0.0;
  double B_est = 0.0;
};

/// Requires ab < 1 and a frame: frame bounds on the full periodic lattice with the same (a, b)
/// must satisfy A_est > 0.1 B_est. Throws FramePreconditionUnmet otherwise.
ObstructionReport diagonal_obstruction_svd(const SymbolToMatrixMap& map);

/// Least-squares spreading masses from a channel matrix.
Eigen::VectorXcd solve_coefficients(const SymbolToMatrixMap& map, const Eigen::MatrixXcd& h);

/// Experiment report fields (window, a, b, ab, band_box, truncation, singular values).
nlohmann::json uniqueness_report(const SymbolToMatrixMap& map, const SvdSummary& full,
                                 const ObstructionReport* obstruction);

}  // namespace tfchan
