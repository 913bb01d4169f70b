#include "doctest.h"
#include "support.hpp"
#include "tfchan/error.hpp"
#include "tfchan/fourier.hpp"
#include "tfchan/reconstruction.hpp"
#include "tfchan/reference.hpp"

using namespace tfchan;

namespace {

struct Setup {
  TimeGrid grid;
  Window window;
  GaborLattice lattice;
  ReconstructionKernel kernel;
};

// Gaussian window, lattice (a, b) with radius k (-1: full torus), quintic bump with eps = 2 steps.
Setup make_setup(double a, double b, long k, BumpProfile profile = BumpProfile::quintic) {
  const TimeGrid g(256, 16.0);
  auto w = gaussian_window(g);
  auto lat = build_lattice(g, a, b, k, k);
  const Box q = lat.nyquist_box();
  const Box inner = profile == BumpProfile::indicator ? q : shrink(q, 2.0 / 16.0);
  const auto bump = build_bump(spreading_plane(g), inner, q, profile);
  auto kernel = build_kernel(w, lat, bump);
  kernel = calibrate(kernel, lat, w).kernel;
  return {g, std::move(w), std::move(lat), std::move(kernel)};
}

// Spreading supported in `box`: Gaussian of width `width` times a quintic taper.
KNOperator enveloped_operator(const TimeGrid& g, Box box, double width, cplx amplitude) {
  const PlaneGrid plane = spreading_plane(g);
  const auto taper = build_bump(plane, Box{0.0, 0.0}, box, BumpProfile::quintic);
  SampledSymbol sp(plane, SymbolDomain::spreading);
  for (std::size_t i = 0; i < sp.rows(); ++i) {
    for (std::size_t j = 0; j < sp.cols(); ++j) {
      const double e = plane.axis1.point(i) / width, u = plane.axis2.point(j) / width;
      sp.at(i, j) = amplitude * std::exp(-kPi * (e * e + u * u)) * taper.samples.at(i, j);
    }
  }
  return KNOperator::from_spreading(std::move(sp), box);
}

double rel(const SampledSymbol& a, const SampledSymbol& b) {
  return relative_error(a.values, b.values);
}

}  // namespace

TEST_SUITE("reconstruction") {
  TEST_CASE("bump profiles") {
    const PlaneGrid plane = spreading_plane(TimeGrid(256, 16.0));
    const Box q{0.5, 0.5};
    const auto ind = build_bump(plane, q, q, BumpProfile::indicator);
    CHECK_FALSE(ind.smooth());
    for (std::size_t i = 0; i < plane.axis1.size(); ++i) {
      for (std::size_t j = 0; j < plane.axis2.size(); ++j) {
        const bool in = q.contains(plane.axis1.point(i), plane.axis2.point(j));
        CHECK(ind.samples.at(i, j) == cplx(in ? 1.0 : 0.0, 0.0));
      }
    }
    for (auto profile : {BumpProfile::quintic, BumpProfile::mollifier}) {
      const Box inner = shrink(q, 0.125);
      const auto b = build_bump(plane, inner, q, profile);
      CHECK(b.smooth());
      CHECK(b.samples.at(128, 128) == cplx(1.0, 0.0));
      CHECK(max_abs(b.samples.values) == 1.0);
      for (std::size_t i = 0; i < plane.axis1.size(); ++i) {
        for (std::size_t j = 0; j < plane.axis2.size(); ++j) {
          const double p = plane.axis1.point(i), r = plane.axis2.point(j);
          const double v = b.samples.at(i, j).real();
          CHECK(b.samples.at(i, j).imag() == 0.0);
          CHECK((v >= 0.0 && v <= 1.0));
          if (inner.contains(p, r)) CHECK(v == 1.0);
          if (!q.contains(p, r)) CHECK(v == 0.0);
        }
      }
      // monotone along the ray through the face and through the corner
      for (long s = 0; s < 127; ++s) {
        CHECK(b.samples.at(plane.axis1.wrap(s + 1), 128).real() <=
              b.samples.at(plane.axis1.wrap(s), 128).real());
        CHECK(b.samples.at(plane.axis1.wrap(s + 1), plane.axis2.wrap(s + 1)).real() <=
              b.samples.at(plane.axis1.wrap(s), plane.axis2.wrap(s)).real());
      }
    }
    CHECK_THROWS_AS(build_bump(plane, q, q, BumpProfile::quintic), DomainError);
    CHECK_THROWS_AS(build_bump(plane, Box{0.1, 0.1}, Box{0.0, 0.5}, BumpProfile::quintic), DomainError);
    CHECK_THROWS_AS(build_bump(plane, Box{0.6, 0.1}, q, BumpProfile::indicator), DomainError);
    CHECK(bump_profile_from_string(to_string(BumpProfile::mollifier)) == BumpProfile::mollifier);
  }

  TEST_CASE("Gaussian kernel minimum on Q is the corner value") {
    const TimeGrid g(256, 16.0);
    const auto w = gaussian_window(g);
    const auto lat = build_full_lattice(g, 1.0, 1.0);
    const auto bump = build_bump(spreading_plane(g), Box{0.5, 0.5}, Box{0.5, 0.5}, BumpProfile::indicator);
    const auto k = build_kernel(w, lat, bump);
    const double corner = std::exp(-kPi / 4.0) / std::sqrt(2.0);
    CHECK(corner == doctest::Approx(0.3224).epsilon(1e-3));
    CHECK(std::abs(k.min_abs_G_on_support - corner) <= 1e-4);
    CHECK(std::abs(std::abs(k.min_eta) - 0.5) < 1e-12);
    CHECK(std::abs(std::abs(k.min_u) - 0.5) < 1e-12);
    CHECK_FALSE(k.calibration_constant.has_value());
  }

  TEST_CASE("kernel construction") {
    const TimeGrid g(256, 16.0);
    const auto w = gaussian_window(g);
    const auto lat = build_full_lattice(g, 1.0, 1.0);
    const auto bump = build_bump(spreading_plane(g), shrink(Box{0.5, 0.5}, 0.125), Box{0.5, 0.5},
                                 BumpProfile::quintic);
    const auto k = build_kernel(w, lat, bump);
    const PlaneGrid& plane = k.khat.grid;
    for (std::size_t i = 0; i < plane.axis1.size(); ++i) {
      for (std::size_t j = 0; j < plane.axis2.size(); ++j) {
        const cplx phi = bump.samples.at(i, j);
        if (phi == 1.0) CHECK(std::abs(k.khat.at(i, j) * std::conj(k.G.at(i, j)) - 1.0) <= 1e-15);
        if (phi == 0.0) CHECK(k.khat.at(i, j) == cplx{});
        CHECK(std::abs(k.G.at(i, j)) > 0.0);
      }
    }
    // closed form against the numerical ambiguity
    const auto num = ambiguity_numeric(w);
    CHECK(max_abs_diff(num.values, k.G.values) <= 1e-8);
    double envelope = 0.0;
    for (std::size_t i = 0; i < plane.axis1.size(); ++i) {
      for (std::size_t j = 0; j < plane.axis2.size(); ++j) {
        const double e = plane.axis1.point(i), u = plane.axis2.point(j);
        const double m = std::exp(-kPi / 2.0 * (e * e + u * u)) / std::sqrt(2.0);
        envelope = std::max(envelope, std::abs(std::abs(k.G.at(i, j)) - m));
      }
    }
    CHECK(envelope <= 1e-8);

    const auto wrong = build_bump(spreading_plane(g), Box{0.2, 0.2}, Box{0.4, 0.5}, BumpProfile::quintic);
    CHECK_THROWS_AS(build_kernel(w, lat, wrong), DomainError);
  }

  TEST_CASE("nonvanishing violation for an indicator window") {
    const TimeGrid g(256, 16.0);
    const auto w = basis_window(g, 1.0);
    // U V_g g of the unit indicator vanishes at (eta, u) = (+-1, 0) and (+-2, 0)
    const auto amb = ambiguity_numeric(w);
    CHECK(std::abs(amb.at(amb.grid.axis1.wrap(16), 128)) <= 1e-12);
    CHECK(std::abs(amb.at(amb.grid.axis1.wrap(-32), 128)) <= 1e-12);

    const auto lat = build_full_lattice(g, 0.25, 1.0);
    const Box q = lat.nyquist_box();
    CHECK(q.half1 == 2.0);
    const auto bump = build_bump(spreading_plane(g), q, q, BumpProfile::indicator);
    try {
      build_kernel(w, lat, bump);
      FAIL("expected NonvanishingViolation");
    } catch (const NonvanishingViolation& e) {
      CHECK(e.value() < 1e-6);
      const double eta = std::abs(e.eta());
      CHECK((std::abs(eta - 1.0) < 1e-12 || std::abs(eta - 2.0) < 1e-12));
      const auto& gp = amb.grid;
      const auto i = gp.axis1.wrap(std::lround(e.eta() / gp.axis1.step()));
      const auto j = gp.axis2.wrap(std::lround(e.u() / gp.axis2.step()));
      CHECK(std::abs(amb.at(i, j)) == doctest::Approx(e.value()).epsilon(1e-9));
    }
    // Q of the a = b = 1 lattice stays clear of the zeros
    const auto lat1 = build_full_lattice(g, 1.0, 1.0);
    const auto bump1 = build_bump(spreading_plane(g), Box{0.375, 0.375}, lat1.nyquist_box(),
                                  BumpProfile::quintic);
    CHECK(build_kernel(w, lat1, bump1).min_abs_G_on_support > 0.1);
  }

  TEST_CASE("lattice sinc interpolation property") {
    const TimeGrid g(256, 16.0);
    const PlaneGrid plane = symbol_plane(g);
    for (double a : {1.0, 0.5}) {
      const auto lat = build_full_lattice(g, a, a);
      const auto s = sinc_lattice(plane, lat);
      CHECK(s.at(128, 128) == cplx(1.0, 0.0));
      for (std::size_t idx = 0; idx < lat.size(); ++idx) {
        const auto z = lat.shift(idx);
        if (z.time == 0 && z.freq == 0) continue;
        CHECK(s.at(plane.axis1.wrap(z.time), plane.axis2.wrap(z.freq)) == cplx{});
      }
    }
  }

  TEST_CASE("lattice sinc transform is ab on Q") {
    // The sampled sinc is cut at half the period of each axis, leaving a ripple of about
    // 0.54 a / P per axis; both axes of this plane have period 64.
    const TimeGrid g(4096, 64.0);
    const PlaneGrid plane = symbol_plane(g);
    for (double a : {1.0, 0.5}) {
      const auto lat = build_lattice(g, a, a, 1, 1);
      const auto f = fourier2d(sinc_lattice(plane, lat), Direction::forward);
      const Box q = lat.nyquist_box();
      double inside = 0.0, outside = 0.0;
      for (std::size_t i = 0; i < plane.axis1.size(); ++i) {
        for (std::size_t j = 0; j < plane.axis2.size(); ++j) {
          const double e = f.grid.axis1.point(i), u = f.grid.axis2.point(j);
          // interior and exterior kept half a box width away from the jump
          if (shrink(q, 0.5 * q.half1).contains(e, u)) {
            inside = std::max(inside, std::abs(f.at(i, j) / lat.ab() - 1.0));
          } else if (!shrink(q, -0.5 * q.half1).contains(e, u)) {
            outside = std::max(outside, std::abs(f.at(i, j)) / lat.ab());
          }
        }
      }
      MESSAGE("sinc FT deviation a=" << a << ": inside " << inside << ", outside " << outside);
      CHECK(inside <= 0.02);
      CHECK(outside <= 0.02);
    }
  }

  TEST_CASE("frequency route basics") {
    auto s = make_setup(1.0, 1.0, -1);
    REQUIRE(s.kernel.calibration_constant.has_value());
    const std::vector<cplx> zero(s.lattice.size());
    CHECK(max_abs(reconstruct_frequency(zero, s.lattice, s.kernel).values) == 0.0);

    const auto op = synth_bandlimited(s.grid, shrink(s.lattice.nyquist_box(), 0.125), 3, Smoothness::smooth);
    const auto d = diag_via_convolution(op, s.window, s.lattice);
    const cplx al(0.3, -2.0);
    std::vector<cplx> scaled(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) scaled[i] = al * d[i];
    const auto r1 = reconstruct_frequency(d, s.lattice, s.kernel);
    auto r2 = reconstruct_frequency(scaled, s.lattice, s.kernel);
    for (auto& v : r2.values) v /= al;
    CHECK(rel(r2, r1) <= 1e-13);

    auto raw = s.kernel;
    raw.calibration_constant.reset();
    CHECK_THROWS_AS(reconstruct_frequency(d, s.lattice, raw), DomainError);
    CHECK_THROWS_AS(reconstruct_time(d, s.lattice, raw), DomainError);
    CHECK_THROWS_AS(reconstruct_frequency(std::vector<cplx>(3), s.lattice, s.kernel), GridMismatch);
    const auto other = build_full_lattice(s.grid, 0.5, 0.5);
    CHECK_THROWS_AS(reconstruct_frequency(std::vector<cplx>(other.size()), other, s.kernel), DomainError);
  }

  TEST_CASE("exact recovery of bandlimited symbols") {
    auto s = make_setup(1.0, 1.0, -1);
    const Box band = shrink(s.lattice.nyquist_box(), 0.125);
    double worst_freq = 0.0, worst_route = 0.0, worst_support = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto op = synth_bandlimited(s.grid, band, 50 + seed,
                                        seed % 2 ? Smoothness::white : Smoothness::smooth);
      const auto d = channel_matrix(op, s.window, s.lattice).diagonal();
      const auto rf = reconstruct_frequency(d, s.lattice, s.kernel);
      const auto rt = reconstruct_time(d, s.lattice, s.kernel);
      CHECK(rt.truncation_tail == 0.0);
      worst_freq = std::max(worst_freq, rel(rf, op.symbol()));
      worst_route = std::max(worst_route, rel(rt.symbol, rf));
      const auto sp = fourier2d(rf, Direction::forward);
      const Box q = s.lattice.nyquist_box();
      double out = 0.0;
      for (std::size_t i = 0; i < sp.rows(); ++i) {
        for (std::size_t j = 0; j < sp.cols(); ++j) {
          if (!q.contains(sp.grid.axis1.point(i), sp.grid.axis2.point(j))) {
            out = std::max(out, std::abs(sp.at(i, j)));
          }
        }
      }
      worst_support = std::max(worst_support, out / max_abs(sp.values));
    }
    CHECK(worst_freq <= 1e-6);
    CHECK(worst_route <= 1e-6);
    CHECK(worst_support <= 1e-9);
  }

  TEST_CASE("time route matches the serial reference and a one-term sum") {
    auto s = make_setup(1.0, 1.0, 3);
    std::vector<cplx> d(s.lattice.size());
    d[static_cast<std::size_t>(s.lattice.index_of({0, 0}))] = cplx(0.7, 0.1);
    const auto rt = reconstruct_time(d, s.lattice, s.kernel);
    const auto rf = reconstruct_frequency(d, s.lattice, s.kernel);
    CHECK(max_abs_diff(rt.symbol.values, rf.values) <= 1e-9);
    auto k = kernel_in_symbol_domain(s.kernel);
    for (auto& v : k.values) v *= cplx(0.7, 0.1) * *s.kernel.calibration_constant;
    CHECK(max_abs_diff(rt.symbol.values, k.values) <= 1e-12);

    const auto op = synth_bandlimited(s.grid, Box{0.375, 0.375}, 9, Smoothness::smooth);
    const auto diag = diag_via_convolution(op, s.window, s.lattice);
    const auto par = reconstruct_time(diag, s.lattice, s.kernel);
    const auto ser = reference::reconstruct_time(diag, s.lattice, s.kernel);
    CHECK(rel(par.symbol, ser) <= 1e-12);
    CHECK(par.truncation_tail > 0.0);
  }

  TEST_CASE("truncation error shrinks as the lattice grows") {
    const TimeGrid g(256, 16.0);
    const auto op = enveloped_operator(g, Box{0.375, 0.375}, 0.2165, cplx(1.0, 0.5));
    std::vector<double> errors, tails;
    for (long k : {4, 6, 8}) {
      auto s = make_setup(1.0, 1.0, k);
      const auto d = diag_via_convolution(op, s.window, s.lattice);
      const auto rt = reconstruct_time(d, s.lattice, s.kernel);
      errors.push_back(rel(rt.symbol, op.symbol()));
      tails.push_back(rt.truncation_tail);
    }
    MESSAGE("truncation errors K=4,6,8: " << errors[0] << " " << errors[1] << " " << errors[2]);
    CHECK(errors[1] <= errors[0]);
    CHECK(errors[2] <= errors[1]);
    CHECK(tails[2] <= tails[0]);
  }

  TEST_CASE("enveloped spreading with a negligible tail") {
    auto s = make_setup(1.0, 1.0, -1);
    const auto op = enveloped_operator(s.grid, Box{0.375, 0.375}, 0.2, cplx(-0.4, 0.9));
    const auto d = diag_via_convolution(op, s.window, s.lattice);
    const auto rf = reconstruct_frequency(d, s.lattice, s.kernel);
    const auto rt = reconstruct_time(d, s.lattice, s.kernel);
    CHECK(rt.truncation_tail < 1e-8);
    CHECK(rel(rf, op.symbol()) <= 1e-6);
    CHECK(rel(rt.symbol, rf) <= 1e-6);
  }

  TEST_CASE("deconvolution identity") {
    auto s = make_setup(1.0, 1.0, -1);
    const auto op = synth_bandlimited(s.grid, Box{0.375, 0.375}, 4, Smoothness::white);
    auto sigma = op.symbol();
    sigma.support_box.reset();
    const auto blurred = convolve2d(sigma, star_involution(rihaczek(s.window.signal, s.window.signal)));
    const auto bh = fourier2d(blurred, Direction::forward);
    const auto& sp = op.spreading();
    double worst = 0.0;
    for (std::size_t k = 0; k < bh.values.size(); ++k) {
      const cplx phi = s.kernel.phi.samples.values[k];
      if (phi != 1.0) continue;
      worst = std::max(worst, std::abs(bh.values[k] * s.kernel.khat.values[k] - sp.values[k]));
    }
    CHECK(worst <= 1e-8 * max_abs(sp.values));
  }

  TEST_CASE("calibration constant") {
    const TimeGrid g(256, 16.0);
    const auto w = gaussian_window(g);
    std::vector<cplx> constants;
    for (double a : {1.0, 0.5}) {
      const auto lat = build_full_lattice(g, a, a);
      const Box q = lat.nyquist_box();
      const auto bump = build_bump(spreading_plane(g), shrink(q, 0.125), q, BumpProfile::quintic);
      const auto kernel = build_kernel(w, lat, bump);
      const auto c0 = calibrate(kernel, lat, w, 0);
      CHECK(c0.relative_to_ab <= 0.01);
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto c = calibrate(kernel, lat, w, seed);
        CHECK(std::abs(c.measured - c0.measured) <= 1e-6 * std::abs(c0.measured));
      }
      const auto op = calibration_operator(c0.kernel, g, 5);
      const auto d = diag_via_convolution(op, w, lat);
      CHECK(rel(reconstruct_frequency(d, lat, c0.kernel), op.symbol()) <= 1e-4);
      constants.push_back(c0.measured);
    }
    CHECK(std::abs(constants[0] / constants[1] - 4.0) <= 0.04);
    // a truncated lattice measures the constant of its full counterpart
    const auto lat3 = build_lattice(g, 1.0, 1.0, 3, 3);
    const auto bump = build_bump(spreading_plane(g), Box{0.375, 0.375}, Box{0.5, 0.5}, BumpProfile::quintic);
    const auto c3 = calibrate(build_kernel(w, lat3, bump), lat3, w);
    CHECK(std::abs(c3.measured - constants[0]) <= 1e-9);
  }

  TEST_CASE("out-of-band spreading is detected") {
    auto s = make_setup(1.0, 1.0, -1);
    const auto op = synth_bandlimited(s.grid, Box{0.875, 0.875}, 6, Smoothness::white);
    const auto d = diag_via_convolution(op, s.window, s.lattice);
    const double err = rel(reconstruct_frequency(d, s.lattice, s.kernel), op.symbol());
    CHECK(err > 1e-2);
    CHECK(band_violation(op, s.kernel.phi.inner) > 0.1);
    const auto inband = synth_bandlimited(s.grid, s.kernel.phi.inner, 6, Smoothness::white);
    CHECK(band_violation(inband, s.kernel.phi.inner) == 0.0);
  }
}
