#include "doctest.h"
#include "support.hpp"
#include "tfchan/error.hpp"
#include "tfchan/fourier.hpp"
#include "tfchan/reference.hpp"
#include "tfchan/tf.hpp"

using namespace tfchan;
using tfchan::testing::random_signal;
using tfchan::testing::random_symbol;

TEST_SUITE("tf_core") {
  TEST_CASE("tf_shift identity, unitarity and ordering") {
    const TimeGrid g(256, 16.0);
    const auto f = random_signal(g, 1);
    CHECK(tf_shift(f, PhasePoint{0.0, 0.0}).values == f.values);
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<long> pick(-128, 127);
    for (int trial = 0; trial < 20; ++trial) {
      const PhasePoint z{pick(rng) * g.step(), pick(rng) * g.dual_step()};
      const auto s = tf_shift(f, z);
      CHECK(std::abs(s.norm() - f.norm()) <= 1e-12 * f.norm());
      const auto two = tf_shift(tf_shift(f, PhasePoint{z.x, 0.0}), PhasePoint{0.0, z.xi});
      CHECK(two.values == s.values);
    }
  }

  TEST_CASE("tf_shift values") {
    const TimeGrid g(64, 8.0);
    const auto f = random_signal(g, 3);
    const auto s = tf_shift(f, GridShift{5, -3});
    for (std::size_t k = 0; k < 64; ++k) {
      const double t = g.point(k);
      const cplx phase = std::exp(cplx(0.0, 2.0 * kPi * (-3.0 * g.dual_step()) * t));
      CHECK(std::abs(s[k] - phase * f[g.wrap(g.offset(k) - 5)]) <= 1e-12);
    }
  }

  TEST_CASE("tf_shift off-grid names the nearest point") {
    const TimeGrid g(256, 16.0);
    const auto f = random_signal(g, 1);
    try {
      tf_shift(f, PhasePoint{0.1, 0.0});
      FAIL("expected OffGrid");
    } catch (const OffGrid& e) {
      CHECK(e.nearest() == doctest::Approx(0.125));
      CHECK(std::string(e.what()).find("nearest") != std::string::npos);
    }
    CHECK_THROWS_AS(tf_shift(f, PhasePoint{0.0, 0.01}), OffGrid);
  }

  TEST_CASE("windows") {
    const TimeGrid g(256, 16.0);
    const auto w = gaussian_window(g);
    CHECK(w.schwartz_class);
    CHECK(w.closed_form_stft_available);
    for (std::size_t k = 0; k < 256; ++k) {
      CHECK(std::abs(w.signal[k] - std::exp(-kPi * g.point(k) * g.point(k))) <= 1e-12);
    }
    const auto r = rectangular_window(g, -1.0, 1.0);
    CHECK_FALSE(r.schwartz_class);
    CHECK(r.signal[g.wrap(-16)] == cplx(0.5, 0.0));
    CHECK(r.signal[g.wrap(16)] == cplx(0.5, 0.0));
    CHECK(r.signal[g.wrap(0)] == cplx(1.0, 0.0));
    CHECK(r.signal[g.wrap(17)] == cplx(0.0, 0.0));
    const auto b = basis_window(g, 1.0);
    CHECK(b.basis_generator);
    CHECK(b.signal.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(custom_window(SampledSignal(g)), DomainError);
    CHECK_THROWS_AS(rectangular_window(g, 1.0, -1.0), DomainError);
  }

  TEST_CASE("Gaussian STFT closed form") {
    const TimeGrid g(256, 16.0);
    const auto w = gaussian_window(g);
    const auto v = stft(w.signal, w);
    CHECK(v.domain == SymbolDomain::symbol);
    CHECK(std::abs(v.at(128, 128) - 1.0 / std::sqrt(2.0)) <= 1e-8);
    double sup = 0.0;
    for (std::size_t i = 0; i < 256; ++i) {
      for (std::size_t j = 0; j < 256; ++j) {
        const cplx c = gaussian_stft(v.grid.axis1.point(i), v.grid.axis2.point(j));
        sup = std::max(sup, std::abs(v.at(i, j) - c));
      }
    }
    CHECK(sup <= 1e-8);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> pick(0, 255);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t i = pick(rng), j = pick(rng);
      const double x = g.point(i), xi = g.dual().point(j);
      // completing the square in dt * sum exp(-pi t^2 - pi (t - x)^2 - 2 pi i xi t)
      const cplx expect = std::exp(cplx(-kPi / 2 * xi * xi - kPi / 2 * x * x, -kPi * xi * x)) /
                          std::sqrt(2.0);
      CHECK(std::abs(v.at(i, j) - expect) <= 1e-8);
      const double envelope = std::exp(-kPi / 2 * (xi * xi + x * x)) / std::sqrt(2.0);
      CHECK(std::abs(std::abs(v.at(i, j)) - envelope) <= 1e-8);
    }
  }

  TEST_CASE("STFT against the direct sum, and Cauchy-Schwarz") {
    const TimeGrid g(32, 4.0);
    const auto f = random_signal(g, 6), w = random_signal(g, 7);
    const auto v = stft(f, w);
    CHECK(relative_error(v.values, reference::stft_direct(f, w).values) <= 1e-12);
    CHECK(max_abs(v.values) <= f.norm() * w.norm() * (1.0 + 1e-12));
    CHECK_THROWS_AS(stft(f, SampledSignal(g)), DomainError);
    CHECK_THROWS_AS(stft(f, random_signal(TimeGrid(32, 8.0), 1)), GridMismatch);
  }

  TEST_CASE("Rihaczek of the Gaussian") {
    const TimeGrid g(256, 16.0);
    const auto w = gaussian_window(g).signal;
    const auto r = rihaczek(w, w);
    CHECK(std::abs(r.at(128, 128) - 1.0) <= 1e-10);
    const auto expect = sample_function(r.grid, [](double x, double xi) {
      return std::exp(cplx(-kPi * (x * x + xi * xi), -2.0 * kPi * x * xi));
    });
    CHECK(max_abs_diff(r.values, expect.values) <= 1e-10);
  }

  TEST_CASE("Rihaczek and STFT are related by fourier2d and u_swap") {
    const TimeGrid g(64, 8.0);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto f = random_signal(g, 10 + s), h = random_signal(g, 20 + s);
      const auto lhs = fourier2d(rihaczek(f, h), Direction::forward);
      const auto rhs = u_swap(stft(f, h));
      CHECK(lhs.domain == rhs.domain);
      CHECK(relative_error(lhs.values, rhs.values) <= 1e-8);
      const auto r = rihaczek(f, h);
      CHECK(std::abs(r.norm() - f.norm() * h.norm()) <= 1e-10 * f.norm() * h.norm());
    }
  }

  TEST_CASE("u_swap") {
    const TimeGrid g(64, 8.0);
    const PlaneGrid plane = symbol_plane(g);
    const auto even = sample_function(plane, [](double x, double xi) {
      return cplx(std::exp(-kPi * (x * x + xi * xi)), 0.0);
    });
    CHECK(u_swap(even).values == even.values);
    const auto r = random_symbol(plane, 3);
    const auto once = u_swap(r);
    CHECK(once.domain == SymbolDomain::spreading);
    // (U F)(xi, x) = F(-x, xi)
    CHECK(once.at(10, 20) == r.at(g.negate(20), 10));
    CHECK(u_swap(u_swap(u_swap(once))).values == r.values);
    CHECK_THROWS_AS(u_swap(random_symbol(symbol_plane(TimeGrid(64, 4.0)), 1)), GridMismatch);
  }

  TEST_CASE("u_swap of the Gaussian STFT equals fourier2d of its Rihaczek") {
    const TimeGrid g(256, 16.0);
    const auto w = gaussian_window(g);
    const auto lhs = u_swap(stft(w.signal, w));
    const auto rhs = fourier2d(rihaczek(w.signal, w.signal), Direction::forward);
    CHECK(max_abs_diff(lhs.values, rhs.values) <= 1e-8);
    for (std::size_t i = 0; i < 256; i += 17) {
      for (std::size_t j = 0; j < 256; j += 13) {
        const cplx c = gaussian_ambiguity(lhs.grid.axis1.point(i), lhs.grid.axis2.point(j));
        CHECK(std::abs(lhs.at(i, j) - c) <= 1e-8);
      }
    }
  }

  TEST_CASE("star involution") {
    const TimeGrid g(64, 8.0);
    const PlaneGrid plane = symbol_plane(g);
    const auto even = sample_function(plane, [](double x, double xi) {
      return cplx(std::exp(-kPi * (x * x + 2.0 * xi * xi)), 0.0);
    });
    CHECK(star_involution(even).values == even.values);
    const auto r = random_symbol(plane, 8);
    CHECK(star_involution(star_involution(r)).values == r.values);
    const auto lhs = fourier2d(star_involution(r), Direction::forward);
    auto rhs = fourier2d(r, Direction::forward);
    for (auto& v : rhs.values) v = std::conj(v);
    CHECK(max_abs_diff(lhs.values, rhs.values) <= 1e-10 * max_abs(rhs.values));
  }

  TEST_CASE("Rihaczek covariance under lattice shifts") {
    const TimeGrid g(256, 16.0);
    const auto w = gaussian_window(g).signal;
    const auto base = rihaczek(w, w);
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<long> pick(-6, 6);
    for (int trial = 0; trial < 20; ++trial) {
      const long k = pick(rng), l = pick(rng);
      const GridShift z{k * 16, l * 16};
      const auto s = tf_shift(w, z);
      const auto r = rihaczek(s, s);
      double sup = 0.0;
      for (std::size_t i = 0; i < 256; ++i) {
        for (std::size_t j = 0; j < 256; ++j) {
          const auto ii = g.wrap(g.offset(i) - z.time), jj = g.wrap(g.offset(j) - z.freq);
          sup = std::max(sup, std::abs(r.at(i, j) - base.at(ii, jj)));
        }
      }
      CHECK(sup <= 1e-8);
    }
  }
}
