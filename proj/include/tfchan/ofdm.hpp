#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfchan/gabor.hpp"
#include "tfchan/psido.hpp"
#include "tfchan/reconstruction.hpp"
#include "tfchan/tf.hpp"

namespace tfchan {

/// {+-1 +- i} / sqrt(2).
const std::vector<cplx>& qpsk_alphabet();
cplx slice_qpsk(cplx z);
std::vector<cplx> random_qpsk(std::size_t count, std::uint64_t seed);

struct TransmitFrame {
  /// Coefficients c_lambda in lattice order; zero marks a guard position.
  std::vector<cplx> data;
  std::vector<bool> pilot_mask;
  SampledSignal signal;
};

/// f = sum c_lambda pi(lambda) g. Pilots must have unit modulus; other entries must be zero or,
/// when enforce_alphabet is set, QPSK symbols. Throws DomainError otherwise.
TransmitFrame modulate(const std::vector<cplx>& data, const std::vector<bool>& pilot_mask,
                       const Window& g, const GaborLattice& lattice, bool enforce_alphabet = true);

/// Seeded complex white noise with mean power exactly 1.
SampledSignal unit_noise(const TimeGrid& grid, std::uint64_t seed);

struct Transmission {
  SampledSignal received;
  /// 10 log10(P_signal / P_noise) measured on the samples; +inf without noise.
  double measured_snr_db = std::numeric_limits<double>::infinity();
};

/// apply_spreading(op, f) plus `noise` rescaled so the sample SNR equals snr_db.
/// snr_db = +inf adds nothing.
Transmission transmit(const SampledSignal& f, const KNOperator& op, double snr_db,
                      const SampledSignal& noise);
Transmission transmit(const SampledSignal& f, const KNOperator& op, double snr_db,
                      std::uint64_t noise_seed);

/// y_lambda = <f, pi(lambda) g>.
std::vector<cplx> demodulate(const SampledSignal& f, const Window& g, const GaborLattice& lattice);

struct PilotEstimate {
  std::vector<std::size_t> pilot_indices;
  std::vector<cplx> diag_est;
  /// r |diag_est| / (1 - r) per pilot, r = sum_{mu != lambda} |Gram_lambda,mu| |c_mu| / (|g|^2 |c_lambda|);
  /// +inf when r >= 1.
  std::vector<double> leakage_bound;
};

/// Single-tap estimate y_lambda / c_lambda on the pilot positions; throws DomainError for a zero
/// pilot or when no pilot is present.
PilotEstimate estimate_diagonal_from_pilots(const std::vector<cplx>& y, const TransmitFrame& frame,
                                            const Window& g, const GaborLattice& lattice);

enum class EqualizerMode { full_solve, diagonal_only };
std::string to_string(EqualizerMode m);
EqualizerMode equalizer_mode_from_string(const std::string& s);

struct Equalized {
  std::vector<cplx> raw;
  std::vector<cplx> decisions;
  double condition_number = 0.0;
};

/// full_solve: argmin |H c - y|^2 + (tikhonov |H|_2)^2 |c|^2 by QR on the stacked system; throws
/// DomainError with the condition number when sigma_min <= tikhonov sigma_max.
/// diagonal_only: c = y / diag(H); throws on a zero diagonal entry.
Equalized equalize(const std::vector<cplx>& y, const Eigen::MatrixXcd& h, EqualizerMode mode,
                   double tikhonov = 1e-10);

enum class ChannelKind { identity, bandlimited, scatterers };
std::string to_string(ChannelKind k);
ChannelKind channel_kind_from_string(const std::string& s);

/// Unit-mass spreading at the origin.
KNOperator identity_operator(const TimeGrid& grid);

struct OfdmConfig {
  std::size_t n = 1024;
  double period = 32.0;
  WindowKind window = WindowKind::gaussian;
  double a = 1.0, b = 1.0;
  long k1 = 3, k2 = 3;
  /// Pilot sublattice (p a) Z x (p b) Z over the full periodic lattice.
  long pilot_spacing = 4;
  cplx pilot_value{1.0, 0.0};
  ChannelKind channel = ChannelKind::bandlimited;
  cplx los_gain{1.0, 0.0};
  double random_scale = 0.3;
  /// Defaults to the flat part of the reconstruction bump.
  std::optional<Box> channel_band;
  Smoothness smoothness = Smoothness::white;
  std::vector<Scatterer> scatterers;
  double snr_db = std::numeric_limits<double>::infinity();
  EqualizerMode mode = EqualizerMode::full_solve;
  double tikhonov = 1e-10;
  BumpProfile profile = BumpProfile::quintic;
  long eps_steps = 2;
  std::uint64_t seed = 0;
};

struct ReceiveReport {
  std::vector<cplx> data;
  std::vector<cplx> y;
  ChannelMatrix H_est;
  ChannelMatrix H_true;
  std::vector<cplx> c_est;
  std::vector<cplx> decisions;
  PilotEstimate pilots;
  SampledSignal tx_signal;
  SampledSignal rx_signal;
  double sER = 0.0;
  double evm = 0.0;
  double evm_db = -std::numeric_limits<double>::infinity();
  double condition_number = 0.0;
  double snr_db = std::numeric_limits<double>::infinity();
  double measured_snr_db = std::numeric_limits<double>::infinity();
  double h_est_relative_error = 0.0;
  double calibration_constant = 0.0;
  double band_violation = 0.0;
};

/// The channel the pipeline simulates for a config.
KNOperator build_channel(const OfdmConfig& cfg);

/// Training frame of pilots on the pilot sublattice, then a QPSK payload on the truncated data
/// lattice; diagonal estimate -> reconstructed operator -> H_est -> equalization. Stage failures
/// are rethrown as StageError.
ReceiveReport run_pipeline(const OfdmConfig& cfg);

nlohmann::json to_json(const ReceiveReport& r);

}  // namespace tfchan
