#include "tfchan/gabor.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "tfchan/error.hpp"
#include "tfchan/fourier.hpp"
#include "tfchan/signal_io.hpp"

namespace tfchan {

namespace {

long aligned_steps(double value, double step, const char* name) {
  const double r = value / step;
  const double m = std::round(r);
  if (!(value > 0.0) || m < 1.0 || std::abs(r - m) > 1e-9 * std::max(1.0, r)) {
    const double nearest = std::max(1.0, m) * step;
    std::ostringstream msg;
    msg << std::setprecision(12) << "lattice parameter " << name << "=" << value
        << " is not a positive multiple of the grid step " << step
        << "; nearest representable " << name << "=" << nearest;
    throw OffGrid(msg.str(), nearest);
  }
  return static_cast<long>(m);
}

}  // namespace

PhasePoint GaborLattice::point(std::size_t idx) const {
  const auto& p = points_.at(idx);
  return {static_cast<double>(p.k) * a_, static_cast<double>(p.l) * b_};
}

GridShift GaborLattice::shift(std::size_t idx) const {
  const auto& p = points_.at(idx);
  return {p.k * n_a_, p.l * n_b_};
}

long GaborLattice::index_of(LatticeIndex p) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i] == p) return static_cast<long>(i);
  }
  return -1;
}

long GaborLattice::torus_count_time() const {
  const long n = static_cast<long>(grid_.size());
  return n % n_a_ == 0 ? n / n_a_ : 0;
}

long GaborLattice::torus_count_freq() const {
  const long n = static_cast<long>(grid_.size());
  return n % n_b_ == 0 ? n / n_b_ : 0;
}

bool GaborLattice::covers_torus() const {
  const long ct = torus_count_time(), cf = torus_count_freq();
  return ct > 0 && cf > 0 && static_cast<long>(points_.size()) == ct * cf;
}

GaborLattice build_lattice(const TimeGrid& grid, double a, double b, long k1, long k2) {
  GaborLattice lat(grid);
  lat.n_a_ = aligned_steps(a, grid.step(), "a");
  lat.n_b_ = aligned_steps(b, grid.dual_step(), "b");
  lat.a_ = static_cast<double>(lat.n_a_) * grid.step();
  lat.b_ = static_cast<double>(lat.n_b_) * grid.dual_step();
  const long half = static_cast<long>(grid.size() / 2);
  const long kmax_t = half / lat.n_a_;
  const long kmax_f = half / lat.n_b_;
  lat.k1_ = k1 < 0 ? kmax_t : k1;
  lat.k2_ = k2 < 0 ? kmax_f : k2;
  for (long k = -lat.k1_; k <= lat.k1_; ++k) {
    const long t = k * lat.n_a_;
    if (t < -half || t > half - 1) continue;
    for (long l = -lat.k2_; l <= lat.k2_; ++l) {
      const long f = l * lat.n_b_;
      if (f < -half || f > half - 1) continue;
      lat.points_.push_back({k, l});
    }
  }
  return lat;
}

GaborLattice build_full_lattice(const TimeGrid& grid, double a, double b) {
  return build_lattice(grid, a, b, -1, -1);
}

SampledSignal gabor_atom(const Window& g, const GaborLattice& lattice, LatticeIndex p) {
  const long idx = lattice.index_of(p);
  if (idx < 0) {
    throw DomainError("gabor_atom: (" + std::to_string(p.k) + ", " + std::to_string(p.l) +
                      ") is not in the truncated lattice");
  }
  if (g.signal.grid != lattice.grid()) throw GridMismatch("gabor_atom: grid mismatch");
  return tf_shift(g.signal, lattice.shift(static_cast<std::size_t>(idx)));
}

Eigen::MatrixXcd atom_matrix(const Window& g, const GaborLattice& lattice) {
  if (g.signal.grid != lattice.grid()) throw GridMismatch("atom_matrix: grid mismatch");
  const std::size_t n = lattice.grid().size();
  const std::size_t m = lattice.size();
  Eigen::MatrixXcd phi(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
#pragma omp parallel for schedule(static)
  for (long j = 0; j < static_cast<long>(m); ++j) {
    const auto atom = tf_shift(g.signal, lattice.shift(static_cast<std::size_t>(j)));
    for (std::size_t k = 0; k < n; ++k) phi(static_cast<Eigen::Index>(k), j) = atom[k];
  }
  return phi;
}

FrameBounds frame_bounds(const Window& g, const GaborLattice& lattice) {
  const TimeGrid& grid = lattice.grid();
  const std::size_t n = grid.size();
  FrameBounds fb;
  fb.window_without_decay = !g.schwartz_class;
  fb.frequency_truncated =
      !(lattice.torus_count_freq() > 0 &&
        2 * lattice.k2() + 1 >= lattice.torus_count_freq());

  // Essential support [lo, hi] of the window: energy beyond it below 1e-14 of the total.
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) total += std::norm(g.signal[k]);
  double acc = 0.0;
  std::size_t klo = 0, khi = n - 1;
  for (std::size_t k = 0; k < n; ++k) {
    acc += std::norm(g.signal[k]);
    if (acc > 1e-14 * total) {
      klo = k;
      break;
    }
  }
  acc = 0.0;
  for (std::size_t k = n; k-- > 0;) {
    acc += std::norm(g.signal[k]);
    if (acc > 1e-14 * total) {
      khi = k;
      break;
    }
  }
  const double lo = grid.point(klo), hi = grid.point(khi);

  std::vector<Eigen::Index> interior;
  const bool full_time =
      lattice.torus_count_time() > 0 && 2 * lattice.k1() + 1 >= lattice.torus_count_time();
  long kmin = 0, kmax = 0;
  for (const auto& p : lattice.points()) {
    kmin = std::min(kmin, p.k);
    kmax = std::max(kmax, p.k);
  }
  const double left = static_cast<double>(kmin) * lattice.a() + hi;
  const double right = static_cast<double>(kmax) * lattice.a() + lo;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid.point(k);
    if (full_time || (t >= left - 1e-12 && t <= right + 1e-12)) {
      interior.push_back(static_cast<Eigen::Index>(k));
    }
  }
  fb.interior_samples = interior.size();
  if (interior.empty()) throw DomainError("frame_bounds: lattice too small for any interior");

  const auto phi = atom_matrix(g, lattice);
  Eigen::MatrixXcd rows(static_cast<Eigen::Index>(interior.size()), phi.cols());
  for (std::size_t r = 0; r < interior.size(); ++r) {
    rows.row(static_cast<Eigen::Index>(r)) = phi.row(interior[r]);
  }
  const Eigen::MatrixXcd s = grid.step() * (rows * rows.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(s, Eigen::EigenvaluesOnly);
  fb.lower = std::max(0.0, eig.eigenvalues().minCoeff());
  fb.upper = eig.eigenvalues().maxCoeff();
  return fb;
}

std::vector<cplx> ChannelMatrix::diagonal() const {
  std::vector<cplx> d(static_cast<std::size_t>(entries.rows()));
  for (Eigen::Index i = 0; i < entries.rows(); ++i) d[static_cast<std::size_t>(i)] = entries(i, i);
  return d;
}

ChannelMatrix channel_matrix(const KNOperator& op, const Window& g, const GaborLattice& lattice) {
  if (op.signal_grid() != lattice.grid() || g.signal.grid != lattice.grid()) {
    throw GridMismatch("channel_matrix: operator, window and lattice must share a grid");
  }
  const auto phi = atom_matrix(g, lattice);
  const auto n = phi.rows(), m = phi.cols();
  Eigen::MatrixXcd responses(n, m);
#pragma omp parallel for schedule(dynamic)
  for (long j = 0; j < static_cast<long>(m); ++j) {
    SampledSignal atom(lattice.grid());
    for (Eigen::Index k = 0; k < n; ++k) atom[static_cast<std::size_t>(k)] = phi(k, j);
    const auto out = apply_spreading(op, atom);
    for (Eigen::Index k = 0; k < n; ++k) responses(k, j) = out[static_cast<std::size_t>(k)];
  }
  ChannelMatrix h{lattice, lattice.grid().step() * (phi.adjoint() * responses)};
  if (!h.entries.allFinite()) throw DomainError("channel_matrix: non-finite entries");
  return h;
}

std::vector<cplx> diag_via_convolution(const KNOperator& op, const Window& g,
                                       const GaborLattice& lattice) {
  if (!op.has_samples()) {
    throw DomainError(
        "diag_via_convolution: operator has no sampled symbol; use diag_direct for exact shifts");
  }
  if (op.signal_grid() != lattice.grid() || g.signal.grid != lattice.grid()) {
    throw GridMismatch("diag_via_convolution: operator, window and lattice must share a grid");
  }
  const auto rstar = star_involution(rihaczek(g.signal, g.signal));
  auto sigma = op.symbol();
  sigma.support_box.reset();
  const auto conv = convolve2d(sigma, rstar);
  std::vector<cplx> d(lattice.size());
  for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
    const auto s = lattice.shift(idx);
    d[idx] = conv.at(conv.grid.axis1.wrap(s.time), conv.grid.axis2.wrap(s.freq));
  }
  return d;
}

std::vector<cplx> diag_direct(const KNOperator& op, const Window& g, const GaborLattice& lattice) {
  std::vector<cplx> d(lattice.size());
#pragma omp parallel for schedule(dynamic)
  for (long idx = 0; idx < static_cast<long>(lattice.size()); ++idx) {
    const auto atom = tf_shift(g.signal, lattice.shift(static_cast<std::size_t>(idx)));
    d[static_cast<std::size_t>(idx)] = inner(apply_spreading(op, atom), atom);
  }
  return d;
}

namespace io {

void save_channel_matrix(const ChannelMatrix& h, const std::filesystem::path& stem) {
  const auto& lat = h.lattice;
  nlohmann::json meta;
  meta["lattice"] = {{"a", lat.a()},
                     {"b", lat.b()},
                     {"ab", lat.ab()},
                     {"truncation", {lat.k1(), lat.k2()}},
                     {"grid", {{"n_samples", lat.grid().size()}, {"period", lat.grid().period()}}}};
  meta["index_map"] = "row-major over (k, l), k outer; entry (i, j) = <H pi(mu_j) g, pi(lambda_i) g>";
  meta["points"] = nlohmann::json::array();
  for (const auto& p : lat.points()) meta["points"].push_back({p.k, p.l});
  meta["rows"] = h.entries.rows();
  meta["cols"] = h.entries.cols();
  meta["encoding"] = tfchan::io::kEncoding;
  auto bin = stem;
  bin += ".bin";
  meta["data_file"] = bin.filename().string();
  std::vector<cplx> flat;
  flat.reserve(static_cast<std::size_t>(h.entries.size()));
  for (Eigen::Index i = 0; i < h.entries.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.entries.cols(); ++j) flat.push_back(h.entries(i, j));
  }
  tfchan::io::write_samples(bin, flat);
  auto path = stem;
  path += ".json";
  tfchan::io::write_json(meta, path);
}

void export_channel_csv(const ChannelMatrix& h, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << std::setprecision(17) << "k,l,k2,l2,re,im\n";
  const auto& pts = h.lattice.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const auto v = h.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      os << pts[i].k << ',' << pts[i].l << ',' << pts[j].k << ',' << pts[j].l << ',' << v.real()
         << ',' << v.imag() << '\n';
    }
  }
}

}  // namespace io

}  // namespace tfchan
