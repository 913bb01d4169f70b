#pragma once

#include <cmath>
#include <random>

#include "tfchan/grid.hpp"

namespace tfchan::testing {

inline SampledSignal random_signal(const TimeGrid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  SampledSignal f(grid);
  for (auto& v : f.values) v = {normal(rng), normal(rng)};
  return f;
}

/// Random signal times a Gaussian envelope, so it decays well inside the periodic box.
inline SampledSignal random_localized(const TimeGrid& grid, std::uint64_t seed, double width = 2.0) {
  auto f = random_signal(grid, seed);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid.point(k) / width;
    f[k] *= std::exp(-kPi * t * t);
  }
  return f;
}

inline SampledSymbol random_symbol(const PlaneGrid& plane, std::uint64_t seed,
                                   SymbolDomain tag = SymbolDomain::symbol) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  SampledSymbol s(plane, tag);
  for (auto& v : s.values) v = {normal(rng), normal(rng)};
  return s;
}

inline cplx random_scalar(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  return {normal(rng), normal(rng)};
}

/// max |a - b| / max |b|.
inline double sup_relative(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return den > 0.0 ? num / den : num;
}

}  // namespace tfchan::testing
