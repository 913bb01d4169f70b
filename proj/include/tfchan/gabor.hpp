#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

#include "tfchan/grid.hpp"
#include "tfchan/psido.hpp"
#include "tfchan/tf.hpp"

namespace tfchan {

/// Index (k, l) of the lattice point (k a, l b).
struct LatticeIndex {
  long k = 0;
  long l = 0;
  bool operator==(const LatticeIndex&) const = default;
};

/// Truncated separable lattice a Z x b Z aligned to a signal grid.
///
/// Points are {(k a, l b) : |k| <= K1, |l| <= K2} restricted to the sampled index range of the
/// grid, enumerated row-major with k outer. With K1 >= T / (2a) and K2 >= F / (2b) (F the
/// frequency period) the set is the whole periodic lattice.
class GaborLattice {
 public:
  const TimeGrid& grid() const { return grid_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double ab() const { return a_ * b_; }
  long time_steps() const { return n_a_; }
  long freq_steps() const { return n_b_; }
  long k1() const { return k1_; }
  long k2() const { return k2_; }

  std::size_t size() const { return points_.size(); }
  const std::vector<LatticeIndex>& points() const { return points_; }
  PhasePoint point(std::size_t idx) const;
  GridShift shift(std::size_t idx) const;
  /// Row/column index of a lattice point, or -1 when it is not in the truncated set.
  long index_of(LatticeIndex p) const;

  /// True when the truncated set contains every lattice point of the periodic grid.
  bool covers_torus() const;
  /// Number of lattice rows along time / frequency on the periodic grid.
  long torus_count_time() const;
  long torus_count_freq() const;

  /// Lambda' = b Z x a Z and the adjoint lattice (1/b) Z x (1/a) Z, as (first, second) steps.
  std::pair<double, double> dual_parameters() const { return {b_, a_}; }
  std::pair<double, double> adjoint_parameters() const { return {1.0 / b_, 1.0 / a_}; }
  /// Q = [-1/(2a), 1/(2a)] x [-1/(2b), 1/(2b)].
  Box nyquist_box() const { return {0.5 / a_, 0.5 / b_}; }

  friend GaborLattice build_lattice(const TimeGrid& grid, double a, double b, long k1, long k2);

 private:
  GaborLattice(TimeGrid g) : grid_(g) {}
  TimeGrid grid_;
  double a_ = 0, b_ = 0;
  long n_a_ = 0, n_b_ = 0, k1_ = 0, k2_ = 0;
  std::vector<LatticeIndex> points_;
};

/// Throws OffGrid (naming the nearest representable value) when a or b is not a positive integer
/// multiple of dt or df. Negative radii select the full periodic lattice.
GaborLattice build_lattice(const TimeGrid& grid, double a, double b, long k1, long k2);
/// Radii that cover the whole periodic lattice.
GaborLattice build_full_lattice(const TimeGrid& grid, double a, double b);

/// pi(lambda) g for a point of the truncated set.
SampledSignal gabor_atom(const Window& g, const GaborLattice& lattice, LatticeIndex p);

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
  double ratio() const { return lower > 0.0 ? upper / lower : INFINITY; }
  /// Lattice does not cover all frequencies; the lower bound is then unreliable.
  bool frequency_truncated = false;
  /// Window lacks decay (rectangular or custom); bounds are reported but flagged.
  bool window_without_decay = false;
  std::size_t interior_samples = 0;
};

/// Extremal eigenvalues of the frame operator S = sum_lambda <., pi(lambda) g> pi(lambda) g
/// restricted to signals supported on the interior of the lattice's time coverage.
FrameBounds frame_bounds(const Window& g, const GaborLattice& lattice);

/// Analysis matrix whose columns are the atoms pi(lambda) g in lattice order.
Eigen::MatrixXcd atom_matrix(const Window& g, const GaborLattice& lattice);

struct ChannelMatrix {
  GaborLattice lattice;
  /// entries(i, j) = <sigma^KN pi(mu_j) g, pi(lambda_i) g>.
  Eigen::MatrixXcd entries;

  std::vector<cplx> diagonal() const;
};

/// One operator application per column (parallel), then all inner products as one product.
/// Throws DomainError on non-finite entries.
ChannelMatrix channel_matrix(const KNOperator& op, const Window& g, const GaborLattice& lattice);

/// Samples of (sigma * R(g, g)^*) at the lattice points via FFT convolution.
std::vector<cplx> diag_via_convolution(const KNOperator& op, const Window& g,
                                       const GaborLattice& lattice);

/// <sigma^KN pi(lambda) g, pi(lambda) g> by direct inner products; works for every operator.
std::vector<cplx> diag_direct(const KNOperator& op, const Window& g, const GaborLattice& lattice);

namespace io {
/// <stem>.json header (lattice parameters, index convention) and <stem>.bin entries.
void save_channel_matrix(const ChannelMatrix& h, const std::filesystem::path& stem);
/// CSV rows k,l,k2,l2,re,im.
void export_channel_csv(const ChannelMatrix& h, const std::filesystem::path& path);
}  // namespace io

}  // namespace tfchan
