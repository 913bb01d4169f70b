#include "tfchan/signal_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "tfchan/error.hpp"

namespace tfchan::io {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xFFU) << (8 * (7 - b));
    return r;
  }
}

void put_double(std::ostream& os, double d) {
  const auto bits = to_le(std::bit_cast<std::uint64_t>(d));
  char buf[8];
  std::memcpy(buf, &bits, 8);
  os.write(buf, 8);
}

double get_double(std::istream& is) {
  char buf[8];
  is.read(buf, 8);
  std::uint64_t bits;
  std::memcpy(&bits, buf, 8);
  return std::bit_cast<double>(to_le(bits));
}

fs::path bin_path(const fs::path& stem) {
  auto p = stem;
  p += ".bin";
  return p;
}

fs::path json_path(const fs::path& stem) {
  auto p = stem;
  p += ".json";
  return p;
}

void check_encoding(const json& h) {
  if (h.value("encoding", std::string(kEncoding)) != kEncoding) {
    throw Error("unsupported sample encoding '" + h["encoding"].get<std::string>() + "'");
  }
}

}  // namespace

void write_samples(const fs::path& bin, const std::vector<cplx>& values) {
  std::ofstream os(bin, std::ios::binary);
  if (!os) throw Error("cannot open " + bin.string() + " for writing");
  for (const auto& v : values) {
    put_double(os, v.real());
    put_double(os, v.imag());
  }
}

std::vector<cplx> read_samples(const fs::path& bin, std::size_t count) {
  std::ifstream is(bin, std::ios::binary);
  if (!is) throw Error("cannot open " + bin.string());
  std::vector<cplx> out(count);
  for (auto& v : out) {
    const double re = get_double(is);
    const double im = get_double(is);
    v = {re, im};
  }
  if (!is) throw Error(bin.string() + ": fewer samples than the header declares");
  return out;
}

json header(const SampledSignal& s) {
  return {{"n_samples", s.grid.size()},
          {"period", s.grid.period()},
          {"domain_tag", to_string(s.domain)},
          {"encoding", kEncoding}};
}

json header(const SampledSymbol& s) {
  json h = {{"n_samples", {s.grid.axis1.size(), s.grid.axis2.size()}},
            {"period", {s.grid.axis1.period(), s.grid.axis2.period()}},
            {"domain_tag", to_string(s.domain)},
            {"encoding", kEncoding}};
  if (s.support_box) h["support_box"] = {s.support_box->half1, s.support_box->half2};
  return h;
}

fs::path save(const SampledSignal& s, const fs::path& stem) {
  auto h = header(s);
  h["data_file"] = bin_path(stem).filename().string();
  write_samples(bin_path(stem), s.values);
  write_json(h, json_path(stem));
  return json_path(stem);
}

fs::path save(const SampledSymbol& s, const fs::path& stem) {
  auto h = header(s);
  h["data_file"] = bin_path(stem).filename().string();
  write_samples(bin_path(stem), s.values);
  write_json(h, json_path(stem));
  return json_path(stem);
}

SampledSignal load_signal(const fs::path& header_path) {
  const auto h = read_json(header_path);
  check_encoding(h);
  if (!h.at("n_samples").is_number_integer()) {
    throw Error(header_path.string() + ": n_samples must be an integer for a signal");
  }
  TimeGrid grid(h.at("n_samples").get<std::size_t>(), h.at("period").get<double>());
  auto values = read_samples(header_path.parent_path() / h.at("data_file").get<std::string>(),
                             grid.size());
  return SampledSignal(grid, std::move(values),
                       signal_domain_from_string(h.at("domain_tag").get<std::string>()));
}

SampledSymbol load_symbol(const fs::path& header_path) {
  const auto h = read_json(header_path);
  check_encoding(h);
  const auto& n = h.at("n_samples");
  const auto& p = h.at("period");
  if (!n.is_array() || n.size() != 2 || !p.is_array() || p.size() != 2) {
    throw Error(header_path.string() + ": a symbol needs [n1, n2] and [period1, period2]");
  }
  PlaneGrid grid{TimeGrid(n[0].get<std::size_t>(), p[0].get<double>()),
                 TimeGrid(n[1].get<std::size_t>(), p[1].get<double>())};
  auto values = read_samples(header_path.parent_path() / h.at("data_file").get<std::string>(),
                             grid.size());
  SampledSymbol s(grid, std::move(values),
                  symbol_domain_from_string(h.at("domain_tag").get<std::string>()));
  if (h.contains("support_box")) {
    s.support_box = Box{h["support_box"][0].get<double>(), h["support_box"][1].get<double>()};
  }
  return s;
}

void export_csv(const SampledSignal& s, const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << std::setprecision(17) << "t,re,im\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    os << s.grid.point(k) << ',' << s[k].real() << ',' << s[k].imag() << '\n';
  }
}

void export_csv(const SampledSymbol& s, const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << std::setprecision(17) << "p,q,re,im\n";
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j = 0; j < s.cols(); ++j) {
      const auto v = s.at(i, j);
      os << s.grid.axis1.point(i) << ',' << s.grid.axis2.point(j) << ',' << v.real() << ','
         << v.imag() << '\n';
    }
  }
}

void export_slice_csv(const SampledSymbol& s, double p, const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  const long off = std::lround(p / s.grid.axis1.step());
  const std::size_t i = s.grid.axis1.wrap(off);
  os << std::setprecision(17) << "q,re,im,abs\n";
  for (std::size_t j = 0; j < s.cols(); ++j) {
    const auto v = s.at(i, j);
    os << s.grid.axis2.point(j) << ',' << v.real() << ',' << v.imag() << ',' << std::abs(v)
       << '\n';
  }
}

void write_json(const json& j, const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path.string());
  return json::parse(is);
}

}  // namespace tfchan::io
