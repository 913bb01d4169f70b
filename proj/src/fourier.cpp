#include "tfchan/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

#include "tfchan/error.hpp"

namespace tfchan {
namespace detail {
namespace {

// Planning is not thread-safe in FFTW; execution of an existing plan on new arrays is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n1, std::size_t n2, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    const auto key = std::make_tuple(n1, n2, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const std::size_t total = n1 * (n2 == 0 ? 1 : n2);
    auto* scratch = fftw_alloc_complex(total);
    fftw_plan plan;
    if (n2 == 0) {
      plan = fftw_plan_dft_1d(static_cast<int>(n1), scratch, scratch, sign,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    } else {
      plan = fftw_plan_dft_2d(static_cast<int>(n1), static_cast<int>(n2), scratch, scratch,
                              sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    fftw_free(scratch);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void dft_inplace(cplx* data, std::size_t n, int sign) {
  auto plan = cache().get(n, 0, sign);
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, p, p);
}

void dft2_inplace(cplx* data, std::size_t n1, std::size_t n2, int sign) {
  auto plan = cache().get(n1, n2, sign);
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, p, p);
}

}  // namespace detail

namespace {
inline double alternating(std::size_t k) { return (k & 1U) ? -1.0 : 1.0; }
}  // namespace

// With t_k = (k - n/2) dt and xi_m = (m - n/2) df the kernel exp(-2 pi i t_k xi_m) factors as
// (-1)^k (-1)^m (-1)^(n/2) exp(-2 pi i k m / n).
void detail::centered_dft(cplx* v, std::size_t n, Direction direction, double scale) {
  for (std::size_t k = 0; k < n; ++k) v[k] *= alternating(k);
  dft_inplace(v, n, direction == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD);
  const double global = alternating(n / 2) * scale;
  for (std::size_t m = 0; m < n; ++m) v[m] *= alternating(m) * global;
}

SampledSignal fourier(const SampledSignal& signal, Direction direction) {
  const bool fwd = direction == Direction::forward;
  if (fwd && signal.domain != SignalDomain::time) {
    throw DomainError("fourier: forward transform expects a time-domain signal");
  }
  if (!fwd && signal.domain != SignalDomain::frequency) {
    throw DomainError("fourier: inverse transform expects a frequency-domain signal");
  }
  SampledSignal out(signal.grid.dual(), signal.values,
                    fwd ? SignalDomain::frequency : SignalDomain::time);
  detail::centered_dft(out.values.data(), out.size(), direction, signal.grid.step());
  return out;
}

SampledSymbol fourier2d(const SampledSymbol& symbol, Direction direction) {
  const bool fwd = direction == Direction::forward;
  if (fwd && symbol.domain != SymbolDomain::symbol) {
    throw DomainError("fourier2d: forward transform expects a symbol-domain array");
  }
  if (!fwd && symbol.domain != SymbolDomain::spreading) {
    throw DomainError("fourier2d: inverse transform expects a spreading-domain array");
  }
  const std::size_t n1 = symbol.rows(), n2 = symbol.cols();
  SampledSymbol out(symbol.grid.dual(), symbol.values,
                    fwd ? SymbolDomain::spreading : SymbolDomain::symbol);
  auto& v = out.values;
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) v[i * n2 + j] *= alternating(i + j);
  }
  detail::dft2_inplace(v.data(), n1, n2, fwd ? FFTW_FORWARD : FFTW_BACKWARD);
  const double global = alternating(n1 / 2 + n2 / 2) * symbol.grid.cell();
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) v[i * n2 + j] *= alternating(i + j) * global;
  }
  return out;
}

SampledSymbol convolve2d(const SampledSymbol& a, const SampledSymbol& b) {
  if (a.grid != b.grid) throw GridMismatch("convolve2d: operands live on different planes");
  if (a.domain != b.domain) throw DomainError("convolve2d: operands carry different domain tags");
  if (a.support_box && b.support_box) {
    const double w1 = a.support_box->half1 + b.support_box->half1;
    const double w2 = a.support_box->half2 + b.support_box->half2;
    if (w1 > 0.5 * a.grid.axis1.period() || w2 > 0.5 * a.grid.axis2.period()) {
      throw WrapAroundRisk("convolve2d: combined supports exceed half the period");
    }
  }
  // Transform with the tag each direction expects, then restore it.
  const auto as_symbol = [](SampledSymbol s) {
    s.domain = SymbolDomain::symbol;
    s.support_box.reset();
    return s;
  };
  auto fa = fourier2d(as_symbol(a), Direction::forward);
  const auto fb = fourier2d(as_symbol(b), Direction::forward);
  for (std::size_t k = 0; k < fa.values.size(); ++k) fa.values[k] *= fb.values[k];
  auto out = fourier2d(fa, Direction::inverse);
  out.domain = a.domain;
  if (a.support_box && b.support_box) {
    out.support_box = Box{a.support_box->half1 + b.support_box->half1,
                          a.support_box->half2 + b.support_box->half2};
  }
  return out;
}

}  // namespace tfchan
