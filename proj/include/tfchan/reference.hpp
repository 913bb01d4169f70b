#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tfchan/gabor.hpp"
#include "tfchan/grid.hpp"
#include "tfchan/psido.hpp"
#include "tfchan/reconstruction.hpp"
#include "tfchan/tf.hpp"

/// Single-threaded direct-sum versions of the parallel kernels. No FFTs; used as test oracles and
/// as the benchmark baseline.
namespace tfchan::reference {

/// f^(xi_m) = dt * sum_k f_k exp(-2 pi i xi_m t_k).
SampledSignal dft_direct(const SampledSignal& f);

/// V_g f(x, xi) = dt * sum_t f(t) conj(g(t - x)) exp(-2 pi i xi t).
SampledSymbol stft_direct(const SampledSignal& f, const SampledSignal& g);

/// Riemann sum over every spreading sample (or the exact shifts).
SampledSignal apply_spreading(const KNOperator& op, const SampledSignal& f);

/// df * sum_xi sigma(x, xi) exp(2 pi i x xi) f^(xi) with a direct DFT.
SampledSignal apply_symbol(const KNOperator& op, const SampledSignal& f);

/// Serial column-by-column channel matrix.
Eigen::MatrixXcd channel_matrix(const KNOperator& op, const Window& g, const GaborLattice& lattice);

/// H(i, j) = <sigma, R(pi(lambda_i) g, pi(mu_j) g)>, one bilinear form per entry.
Eigen::MatrixXcd channel_matrix_bilinear(const KNOperator& op, const Window& g,
                                         const GaborLattice& lattice);

/// Time-route reconstruction without threads.
SampledSymbol reconstruct_time(const std::vector<cplx>& diag, const GaborLattice& lattice,
                               const ReconstructionKernel& kernel);

}  // namespace tfchan::reference
