#pragma once

#include "tfchan/grid.hpp"

namespace tfchan {

enum class Direction { forward, inverse };

/// Continuous Fourier transform f^(xi) = int f(x) exp(-2 pi i x xi) dx approximated on the
/// centered grid. Forward maps a time signal to the dual (frequency) grid scaled by dt; inverse
/// maps back scaled by df. Throws DomainError when the domain tag contradicts the direction.
SampledSignal fourier(const SampledSignal& signal, Direction direction);

/// Tensor-product transform; forward maps symbol (x, xi) to spreading (eta, u).
SampledSymbol fourier2d(const SampledSymbol& symbol, Direction direction);

/// Periodic convolution int a(z - w) b(w) dw on a shared plane, evaluated through fourier2d.
/// Throws WrapAroundRisk when both operands carry support boxes whose sum exceeds half a
/// period on either axis.
SampledSymbol convolve2d(const SampledSymbol& a, const SampledSymbol& b);

namespace detail {
/// Unnormalized in-place DFT of length n (sign -1 forward, +1 inverse), thread-safe.
void dft_inplace(cplx* data, std::size_t n, int sign);
/// Unnormalized in-place 2-D DFT of a row-major n1 x n2 array.
void dft2_inplace(cplx* data, std::size_t n1, std::size_t n2, int sign);
/// Centered continuous-FT approximation of n samples in place, multiplied by `scale`
/// (dt forward, df inverse).
void centered_dft(cplx* data, std::size_t n, Direction direction, double scale);
}  // namespace detail

}  // namespace tfchan
