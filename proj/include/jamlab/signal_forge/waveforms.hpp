#pragma once

#include <cstdint>

#include "jamlab/signal_forge/types.hpp"

namespace jamlab::signal_forge {

// Unit-modulus LFM pulse, round(T * fs) samples, instantaneous frequency
// sweeping -B/2 .. +B/2 around the carrier (tracked as metadata only).
ComplexSeries gen_lfm(const RadarParams& p);

// Value of the transmit pulse at pulse-relative time tau (zero outside [0, T)).
cplx lfm_value(const RadarParams& p, double tau_s);

// Aiming jamming: brick-wall band-limited circular Gaussian noise gated to
// [0, duration_s) of a one-PRI receive window. Power over the gate equals
// noise_power * 10^(jnr/10).
ComplexSeries gen_aj(const RadarParams& p, const JammingSpec& j, double duration_s,
                     std::uint64_t seed);

// Single delayed, Doppler-shifted replica at anchor_s + delay_s within the
// receive window. t0_s is the absolute time of the first window sample; the
// Doppler term uses absolute time so slow-time phase progresses across PRIs.
ComplexSeries gen_rftj(const RadarParams& p, const JammingSpec& j, double t0_s = 0.0);

// Window anchor used by gen_rdftj: max(j.anchor_s, -min delay).
double rdftj_anchor(const JammingSpec& j);

// Sum of K replicas. Amplitudes are weighted by FalseTarget::amplitude and
// scaled so the summed replica power equals noise_power * 10^(jnr/10).
ComplexSeries gen_rdftj(const RadarParams& p, const JammingSpec& j, double t0_s = 0.0);

// Circular complex Gaussian noise with the given total variance.
ComplexSeries gen_noise(std::size_t length, double variance, double sample_rate_hz,
                        std::uint64_t seed);

// x plus circular Gaussian noise sized so support_power(x) / variance equals
// snr_db. snr_db = +inf returns x unchanged.
ComplexSeries add_awgn(const ComplexSeries& x, double snr_db, std::uint64_t seed);

struct SceneRequest {
  JammingSpec jamming;
  double target_delay_s = 20e-6;
  // AJ gate length.
  double aj_duration_s = 50e-6;
};

// Unit-amplitude target echo + jamming + receiver noise at p.snr_db.
// composite is the exact elementwise sum clean + jamming + noise.
EchoScene compose_scene(const RadarParams& p, const SceneRequest& req, std::uint64_t seed);

}  // namespace jamlab::signal_forge
