#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfchan/grid.hpp"

namespace tfchan::io {

// On-disk layout: <stem>.json holds the header, <stem>.bin holds the samples as interleaved
// (re, im) IEEE-754 doubles, little-endian, row-major for planes. The header names its data
// file relative to its own directory.
//
//   {"n_samples": 256, "period": 16.0, "domain_tag": "time",
//    "data_file": "f.bin", "encoding": "f64le-interleaved"}
//   {"n_samples": [256, 256], "period": [16.0, 16.0], "domain_tag": "spreading",
//    "support_box": [0.375, 0.375], "data_file": "s.bin", "encoding": "f64le-interleaved"}

inline constexpr const char* kEncoding = "f64le-interleaved";

void write_samples(const std::filesystem::path& bin, const std::vector<cplx>& values);
std::vector<cplx> read_samples(const std::filesystem::path& bin, std::size_t count);

nlohmann::json header(const SampledSignal& s);
nlohmann::json header(const SampledSymbol& s);

/// Writes <stem>.json and <stem>.bin; returns the header path.
std::filesystem::path save(const SampledSignal& s, const std::filesystem::path& stem);
std::filesystem::path save(const SampledSymbol& s, const std::filesystem::path& stem);

SampledSignal load_signal(const std::filesystem::path& header_path);
SampledSymbol load_symbol(const std::filesystem::path& header_path);

/// CSV with columns t,re,im.
void export_csv(const SampledSignal& s, const std::filesystem::path& path);
/// CSV with columns p,q,re,im (one row per plane point).
void export_csv(const SampledSymbol& s, const std::filesystem::path& path);
/// CSV slice along axis2 at the axis1 index nearest p: columns q,re,im,abs.
void export_slice_csv(const SampledSymbol& s, double p, const std::filesystem::path& path);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace tfchan::io
