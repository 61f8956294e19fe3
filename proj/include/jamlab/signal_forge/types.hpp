#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "jamlab/common/numeric.hpp"

namespace jamlab::signal_forge {

struct RadarParams {
  double carrier_hz = 1e9;
  double bandwidth_hz = 28e6;
  double pulse_width_s = 10e-6;
  double pri_s = 50e-6;
  double sample_rate_hz = 100e6;
  double snr_db = 10.0;

  // Throws invalid-params when an invariant is broken.
  void validate() const;

  double chirp_rate() const { return bandwidth_hz / pulse_width_s; }
  std::size_t pulse_samples() const;
  // Receive window is one PRI.
  std::size_t window_samples() const;
  // Noise power relative to a unit-power echo, 10^(-snr/10).
  double noise_power() const { return db_to_linear(-snr_db); }
};

struct ComplexSeries {
  std::vector<cplx> samples;
  double sample_rate_hz = 0.0;
  double t0_s = 0.0;
  double carrier_hz = 0.0;

  std::size_t size() const { return samples.size(); }
  double time_of(std::size_t n) const { return t0_s + double(n) / sample_rate_hz; }
};

// Mean |x|^2 over the samples with nonzero magnitude; 0 for an all-zero series.
double support_power(const ComplexSeries& x);

enum class JammingKind { AJ = 0, RFTJ = 1, RDFTJ = 2 };

inline constexpr std::size_t kJammingKinds = 3;

const char* to_string(JammingKind kind);
JammingKind jamming_kind_from_string(const std::string& name);

struct FalseTarget {
  double delay_s = 0.0;
  double doppler_hz = 0.0;
  double amplitude = 1.0;
};

struct JammingSpec {
  JammingKind kind = JammingKind::AJ;
  double jnr_db = 20.0;
  // Absolute jammer centre frequency; the baseband offset is relative to the
  // radar carrier.
  double jam_center_hz = 1e9;
  double jam_bandwidth_hz = 60e6;
  // RFTJ single replica.
  double delay_s = 0.0;
  double doppler_hz = 0.0;
  // RDFTJ replicas.
  std::vector<FalseTarget> false_targets;
  // Position within the receive window that zero delay refers to.
  double anchor_s = 0.0;
  double angle_deg = 2.0;
};

struct EchoScene {
  ComplexSeries clean_echo;
  ComplexSeries jamming;
  ComplexSeries noise;
  ComplexSeries composite;
  JammingKind label = JammingKind::AJ;
  double target_delay_s = 0.0;
};

}  // namespace jamlab::signal_forge
