#include "tfchan/psido.hpp"

#include <cmath>
#include <random>

#include "tfchan/error.hpp"
#include "tfchan/fourier.hpp"
#include "tfchan/signal_io.hpp"

namespace tfchan {

namespace {

double quintic_taper(double r, double half) {
  if (half <= 0.0) return 0.0;
  const double t = std::min(1.0, std::abs(r) / half);
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

struct SpreadTerm {
  long eta;  // frequency steps
  long u;    // time steps
  cplx weight;
};

// Nonzero spreading samples inside the support box, pre-multiplied by the cell weight.
std::vector<SpreadTerm> spreading_terms(const KNOperator& op) {
  std::vector<SpreadTerm> terms;
  if (!op.has_samples()) {
    for (const auto& s : op.exact_shifts()) {
      const auto z = resolve_shift(op.signal_grid(), PhasePoint{-s.u, s.eta});
      terms.push_back({z.freq, -z.time, s.amplitude});
    }
    return terms;
  }
  const auto& sp = op.spreading();
  const double cell = sp.grid.cell();
  const double slack = 1e-9 * std::max(sp.grid.axis1.step(), sp.grid.axis2.step());
  for (std::size_t i = 0; i < sp.rows(); ++i) {
    const double eta = sp.grid.axis1.point(i);
    for (std::size_t j = 0; j < sp.cols(); ++j) {
      const cplx v = sp.at(i, j);
      if (v == cplx{}) continue;
      if (sp.support_box && !sp.support_box->contains(eta, sp.grid.axis2.point(j), slack)) {
        continue;
      }
      terms.push_back({sp.grid.axis1.offset(i), sp.grid.axis2.offset(j), v * cell});
    }
  }
  return terms;
}

}  // namespace

KNOperator KNOperator::from_spreading(SampledSymbol spreading, Box band_box) {
  if (spreading.domain != SymbolDomain::spreading) {
    throw DomainError("KNOperator::from_spreading: array is not tagged spreading");
  }
  const TimeGrid signal = spreading.grid.axis2;
  if (spreading.grid != spreading_plane(signal)) {
    throw GridMismatch("KNOperator::from_spreading: plane is not a spreading plane");
  }
  KNOperator op(signal);
  spreading.support_box = band_box;
  // Enforce exact vanishing outside the band.
  const double slack = 1e-9 * std::max(spreading.grid.axis1.step(), spreading.grid.axis2.step());
  for (std::size_t i = 0; i < spreading.rows(); ++i) {
    for (std::size_t j = 0; j < spreading.cols(); ++j) {
      if (!band_box.contains(spreading.grid.axis1.point(i), spreading.grid.axis2.point(j),
                             slack)) {
        spreading.at(i, j) = cplx{};
      }
    }
  }
  op.symbol_ = fourier2d(spreading, Direction::inverse);
  op.spreading_ = std::move(spreading);
  op.band_ = band_box;
  return op;
}

KNOperator KNOperator::from_symbol(SampledSymbol symbol, Box band_box) {
  if (symbol.domain != SymbolDomain::symbol) {
    throw DomainError("KNOperator::from_symbol: array is not tagged symbol");
  }
  auto spreading = fourier2d(symbol, Direction::forward);
  return from_spreading(std::move(spreading), band_box);
}

KNOperator KNOperator::from_scatterers(TimeGrid signal_grid, std::vector<Scatterer> shifts) {
  KNOperator op(signal_grid);
  double h1 = 0.0, h2 = 0.0;
  for (const auto& s : shifts) {
    resolve_shift(signal_grid, PhasePoint{-s.u, s.eta});
    h1 = std::max(h1, std::abs(s.eta));
    h2 = std::max(h2, std::abs(s.u));
  }
  op.shifts_ = std::move(shifts);
  op.band_ = Box{h1, h2};
  return op;
}

const SampledSymbol& KNOperator::symbol() const {
  if (!symbol_) throw DomainError("operator is a sum of exact shifts and has no sampled symbol");
  return *symbol_;
}

const SampledSymbol& KNOperator::spreading() const {
  if (!spreading_) {
    throw DomainError("operator is a sum of exact shifts and has no sampled spreading");
  }
  return *spreading_;
}

KNOperator KNOperator::combine(cplx alpha, const KNOperator& other, cplx beta) const {
  if (!has_samples() || !other.has_samples()) {
    throw DomainError("combine: both operators need sampled spreading functions");
  }
  if (spreading().grid != other.spreading().grid) {
    throw GridMismatch("combine: operators live on different planes");
  }
  SampledSymbol sp(spreading().grid, SymbolDomain::spreading);
  for (std::size_t k = 0; k < sp.values.size(); ++k) {
    sp.values[k] = alpha * spreading().values[k] + beta * other.spreading().values[k];
  }
  const Box box{std::max(band_.half1, other.band_.half1), std::max(band_.half2, other.band_.half2)};
  return from_spreading(std::move(sp), box);
}

SampledSymbol KNOperator::symbol_samples() const {
  if (has_samples()) return symbol();
  const PlaneGrid plane = symbol_plane(signal_grid_);
  const std::size_t n = signal_grid_.size();
  const UnitRoots roots(n);
  SampledSymbol out(plane, SymbolDomain::symbol);
  for (const auto& s : shifts_) {
    const auto z = resolve_shift(signal_grid_, PhasePoint{-s.u, s.eta});
    const long eta = z.freq, u = -z.time;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx row = s.amplitude * roots(eta * plane.axis1.offset(i));
      for (std::size_t j = 0; j < n; ++j) out.at(i, j) += row * roots(u * plane.axis2.offset(j));
    }
  }
  return out;
}

KNOperator synth_bandlimited(const TimeGrid& signal_grid, Box band_box, std::uint64_t seed,
                             Smoothness smoothness) {
  const PlaneGrid plane = spreading_plane(signal_grid);
  const double lim1 = 0.5 * plane.axis1.period() - plane.axis1.step();
  const double lim2 = 0.5 * plane.axis2.period() - plane.axis2.step();
  if (band_box.half1 > lim1 || band_box.half2 > lim2 || band_box.half1 < 0.0 ||
      band_box.half2 < 0.0) {
    throw DomainError("synth_bandlimited: band_box exceeds the Nyquist range of the grid");
  }
  SampledSymbol sp(plane, SymbolDomain::spreading);
  if (band_box.half1 > 0.0 && band_box.half2 > 0.0) {
    const double slack = 1e-9 * std::max(plane.axis1.step(), plane.axis2.step());
    std::vector<std::size_t> inside;
    for (std::size_t k = 0; k < sp.values.size(); ++k) {
      const std::size_t i = k / sp.cols(), j = k % sp.cols();
      if (band_box.contains(plane.axis1.point(i), plane.axis2.point(j), slack)) {
        inside.push_back(k);
      }
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const double scale = 1.0 / (plane.cell() * std::sqrt(static_cast<double>(inside.size())));
    for (const auto k : inside) {
      const double re = normal(rng);
      const double im = normal(rng);
      cplx v(re, im);
      if (smoothness == Smoothness::smooth) {
        const std::size_t i = k / sp.cols(), j = k % sp.cols();
        v *= quintic_taper(plane.axis1.point(i), band_box.half1) *
             quintic_taper(plane.axis2.point(j), band_box.half2);
      }
      sp.values[k] = v * scale;
    }
  }
  return KNOperator::from_spreading(std::move(sp), band_box);
}

KNOperator point_scatterer(const TimeGrid& signal_grid, cplx amplitude, double tau, double nu) {
  return KNOperator::from_scatterers(signal_grid, {Scatterer{amplitude, nu, tau}});
}

SampledSignal apply_spreading(const KNOperator& op, const SampledSignal& f) {
  if (f.grid != op.signal_grid()) throw GridMismatch("apply_spreading: grid mismatch");
  if (f.domain != SignalDomain::time) throw DomainError("apply_spreading: expects a time signal");
  const auto terms = spreading_terms(op);
  const TimeGrid& grid = f.grid;
  const std::size_t n = grid.size();
  const UnitRoots roots(n);
  SampledSignal out(grid);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < static_cast<long>(n); ++k) {
    const long x = grid.offset(static_cast<std::size_t>(k));
    cplx acc{};
    for (const auto& t : terms) acc += t.weight * roots(t.eta * x) * f[grid.wrap(x + t.u)];
    out[static_cast<std::size_t>(k)] = acc;
  }
  return out;
}

SampledSignal apply_symbol(const KNOperator& op, const SampledSignal& f) {
  if (!op.has_samples()) {
    throw DomainError(
        "apply_symbol: operator is a sum of exact shifts; use apply_spreading instead");
  }
  if (f.grid != op.signal_grid()) throw GridMismatch("apply_symbol: grid mismatch");
  const auto fhat = fourier(f, Direction::forward);
  const auto& sigma = op.symbol();
  const TimeGrid& grid = f.grid;
  const std::size_t n = grid.size();
  const UnitRoots roots(n);
  const double df = grid.dual_step();
  SampledSignal out(grid);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < static_cast<long>(n); ++k) {
    const std::size_t i = static_cast<std::size_t>(k);
    const long x = grid.offset(i);
    cplx acc{};
    for (std::size_t m = 0; m < n; ++m) acc += sigma.at(i, m) * roots(x * grid.offset(m)) * fhat[m];
    out[i] = acc * df;
  }
  return out;
}

cplx kn_bilinear(const KNOperator& op, const SampledSignal& f, const SampledSignal& g) {
  if (f.grid != op.signal_grid() || g.grid != op.signal_grid()) {
    throw GridMismatch("kn_bilinear: grid mismatch");
  }
  return inner(op.symbol_samples(), rihaczek(g, f));
}

double band_violation(const KNOperator& op, const Box& box) {
  double total = 0.0, outside = 0.0;
  if (!op.has_samples()) {
    for (const auto& s : op.exact_shifts()) {
      const double e = std::norm(s.amplitude);
      total += e;
      if (!box.contains(s.eta, s.u)) outside += e;
    }
  } else {
    const auto& sp = op.spreading();
    const double slack = 1e-9 * std::max(sp.grid.axis1.step(), sp.grid.axis2.step());
    for (std::size_t i = 0; i < sp.rows(); ++i) {
      for (std::size_t j = 0; j < sp.cols(); ++j) {
        const double e = std::norm(sp.at(i, j));
        total += e;
        if (!box.contains(sp.grid.axis1.point(i), sp.grid.axis2.point(j), slack)) outside += e;
      }
    }
  }
  return total > 0.0 ? outside / total : 0.0;
}

namespace io {

void save_operator(const KNOperator& op, const std::filesystem::path& stem) {
  nlohmann::json meta;
  meta["signal_grid"] = {{"n_samples", op.signal_grid().size()},
                         {"period", op.signal_grid().period()}};
  meta["band_box"] = {op.band_box().half1, op.band_box().half2};
  meta["exact_shifts"] = nlohmann::json::array();
  for (const auto& s : op.exact_shifts()) {
    meta["exact_shifts"].push_back(
        {{"re", s.amplitude.real()}, {"im", s.amplitude.imag()}, {"eta", s.eta}, {"u", s.u}});
  }
  if (op.has_samples()) {
    auto sp_stem = stem;
    sp_stem += "_spreading";
    tfchan::io::save(op.spreading(), sp_stem);
    meta["spreading"] = sp_stem.filename().string() + ".json";
  }
  auto path = stem;
  path += ".json";
  tfchan::io::write_json(meta, path);
}

KNOperator load_operator(const std::filesystem::path& header_path) {
  const auto meta = tfchan::io::read_json(header_path);
  const Box band{meta.at("band_box")[0].get<double>(), meta.at("band_box")[1].get<double>()};
  if (meta.contains("spreading")) {
    auto sp = tfchan::io::load_symbol(header_path.parent_path() /
                                      meta["spreading"].get<std::string>());
    return KNOperator::from_spreading(std::move(sp), band);
  }
  const TimeGrid grid(meta.at("signal_grid").at("n_samples").get<std::size_t>(),
                      meta.at("signal_grid").at("period").get<double>());
  std::vector<Scatterer> shifts;
  for (const auto& s : meta.at("exact_shifts")) {
    shifts.push_back({cplx(s.at("re").get<double>(), s.at("im").get<double>()),
                      s.at("eta").get<double>(), s.at("u").get<double>()});
  }
  return KNOperator::from_scatterers(grid, std::move(shifts));
}

}  // namespace io

}  // namespace tfchan
