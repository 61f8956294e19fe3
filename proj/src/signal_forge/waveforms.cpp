#include "jamlab/signal_forge/waveforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jamlab/common/error.hpp"
#include "jamlab/common/fft.hpp"
#include "jamlab/common/rng.hpp"

namespace jamlab::signal_forge {

void RadarParams::validate() const {
  auto finite_pos = [](double v) { return std::isfinite(v) && v > 0.0; };
  require(finite_pos(pulse_width_s) && finite_pos(pri_s), ErrorKind::invalid_params,
          "pulse width and PRI must be positive");
  require(pulse_width_s < pri_s, ErrorKind::invalid_params, "pulse width must be shorter than PRI");
  require(finite_pos(bandwidth_hz), ErrorKind::invalid_params, "bandwidth must be positive");
  require(finite_pos(sample_rate_hz), ErrorKind::invalid_params, "sample rate must be positive");
  require(sample_rate_hz >= bandwidth_hz, ErrorKind::invalid_params,
          "sample rate below complex-baseband Nyquist");
  require(pulse_samples() > 0, ErrorKind::invalid_params, "pulse shorter than one sample");
}

std::size_t RadarParams::pulse_samples() const {
  return std::size_t(std::llround(pulse_width_s * sample_rate_hz));
}

std::size_t RadarParams::window_samples() const {
  return std::size_t(std::llround(pri_s * sample_rate_hz));
}

double support_power(const ComplexSeries& x) {
  double energy = 0.0;
  std::size_t count = 0;
  for (const auto& v : x.samples) {
    const double m = std::norm(v);
    if (m > 0.0) {
      energy += m;
      ++count;
    }
  }
  return count ? energy / double(count) : 0.0;
}

const char* to_string(JammingKind kind) {
  switch (kind) {
    case JammingKind::AJ: return "AJ";
    case JammingKind::RFTJ: return "RFTJ";
    case JammingKind::RDFTJ: return "RDFTJ";
  }
  return "?";
}

JammingKind jamming_kind_from_string(const std::string& name) {
  if (name == "AJ") return JammingKind::AJ;
  if (name == "RFTJ") return JammingKind::RFTJ;
  if (name == "RDFTJ") return JammingKind::RDFTJ;
  throw Error(ErrorKind::invalid_config, "unknown jamming kind '" + name + "'");
}

cplx lfm_value(const RadarParams& p, double tau_s) {
  if (tau_s < 0.0 || tau_s >= p.pulse_width_s) return {0.0, 0.0};
  const double phase = kPi * p.chirp_rate() * tau_s * tau_s - kPi * p.bandwidth_hz * tau_s;
  return std::polar(1.0, phase);
}

namespace {

ComplexSeries empty_window(const RadarParams& p, double t0_s) {
  ComplexSeries out;
  out.samples.assign(p.window_samples(), cplx{});
  out.sample_rate_hz = p.sample_rate_hz;
  out.t0_s = t0_s;
  out.carrier_hz = p.carrier_hz;
  return out;
}

double jam_power(const RadarParams& p, double jnr_db) {
  if (std::isinf(jnr_db) && jnr_db < 0) return 0.0;
  return p.noise_power() * db_to_linear(jnr_db);
}

// Adds amplitude * s_l(tau - start) * exp(j 2 pi doppler t) to the window.
void add_replica(ComplexSeries& out, const RadarParams& p, double start_s, double doppler_hz,
                 double amplitude) {
  const double fs = p.sample_rate_hz;
  const auto first = std::size_t(std::max(0.0, std::floor(start_s * fs)));
  const auto last = std::min(out.size(), std::size_t(std::max(0.0, std::ceil((start_s + p.pulse_width_s) * fs) + 1)));
  for (std::size_t n = first; n < last; ++n) {
    const double tau = double(n) / fs;
    const cplx s = lfm_value(p, tau - start_s);
    if (s == cplx{}) continue;
    const double t = out.t0_s + tau;
    out.samples[n] += amplitude * s * std::polar(1.0, 2.0 * kPi * doppler_hz * t);
  }
}

}  // namespace

ComplexSeries gen_lfm(const RadarParams& p) {
  p.validate();
  ComplexSeries out;
  const std::size_t n = p.pulse_samples();
  out.samples.resize(n);
  out.sample_rate_hz = p.sample_rate_hz;
  out.carrier_hz = p.carrier_hz;
  const double mu = p.chirp_rate();
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = double(i) / p.sample_rate_hz;
    out.samples[i] = std::polar(1.0, kPi * mu * tau * tau - kPi * p.bandwidth_hz * tau);
  }
  return out;
}

ComplexSeries gen_aj(const RadarParams& p, const JammingSpec& j, double duration_s,
                     std::uint64_t seed) {
  p.validate();
  require(j.kind == JammingKind::AJ, ErrorKind::invalid_params, "gen_aj needs an AJ spec");
  require(j.jam_bandwidth_hz > 0.0, ErrorKind::invalid_params, "AJ bandwidth must be positive");
  require(std::isfinite(duration_s) && duration_s > 0.0, ErrorKind::invalid_params,
          "AJ duration must be positive");
  const double fs = p.sample_rate_hz;
  const double offset = j.jam_center_hz - p.carrier_hz;
  require(std::abs(offset) + j.jam_bandwidth_hz / 2.0 <= fs / 2.0, ErrorKind::invalid_params,
          "AJ band exceeds the complex-baseband Nyquist range");

  ComplexSeries out = empty_window(p, 0.0);
  const std::size_t gate = std::min(out.size(), std::size_t(std::llround(duration_s * fs)));
  require(gate > 0, ErrorKind::invalid_params, "AJ gate shorter than one sample");
  const double power = jam_power(p, j.jnr_db);
  if (power == 0.0) return out;

  Rng rng(seed);
  const double phase0 = uniform(rng, 0.0, 2.0 * kPi);
  std::vector<cplx> noise(gate);
  for (auto& v : noise) v = cplx(gaussian(rng), gaussian(rng));

  fft_inplace(noise);
  const double lo = offset - j.jam_bandwidth_hz / 2.0;
  const double hi = offset + j.jam_bandwidth_hz / 2.0;
  for (std::size_t k = 0; k < gate; ++k) {
    const double f = (k < (gate + 1) / 2 ? double(k) : double(k) - double(gate)) * fs / double(gate);
    if (f < lo || f > hi) noise[k] = {};
  }
  fft_inplace(noise, true);

  double realized = 0.0;
  for (const auto& v : noise) realized += std::norm(v);
  realized /= double(gate);
  if (realized == 0.0) return out;
  const cplx scale = std::polar(std::sqrt(power / realized), phase0);
  for (std::size_t n = 0; n < gate; ++n) out.samples[n] = noise[n] * scale;
  return out;
}

ComplexSeries gen_rftj(const RadarParams& p, const JammingSpec& j, double t0_s) {
  p.validate();
  require(j.kind == JammingKind::RFTJ, ErrorKind::invalid_params, "gen_rftj needs an RFTJ spec");
  const double start = j.anchor_s + j.delay_s;
  const double window = double(p.window_samples()) / p.sample_rate_hz;
  require(start < window && start + p.pulse_width_s > 0.0, ErrorKind::invalid_params,
          "delayed replica falls outside the receive window");
  ComplexSeries out = empty_window(p, t0_s);
  const double power = jam_power(p, j.jnr_db);
  if (power > 0.0) add_replica(out, p, start, j.doppler_hz, std::sqrt(power));
  return out;
}

double rdftj_anchor(const JammingSpec& j) {
  double min_delay = 0.0;
  for (const auto& t : j.false_targets) min_delay = std::min(min_delay, t.delay_s);
  return std::max(j.anchor_s, -min_delay);
}

ComplexSeries gen_rdftj(const RadarParams& p, const JammingSpec& j, double t0_s) {
  p.validate();
  require(j.kind == JammingKind::RDFTJ, ErrorKind::invalid_params, "gen_rdftj needs an RDFTJ spec");
  require(!j.false_targets.empty(), ErrorKind::invalid_params, "RDFTJ needs at least one false target");
  const double anchor = rdftj_anchor(j);
  const double window = double(p.window_samples()) / p.sample_rate_hz;
  double weight = 0.0;
  for (const auto& t : j.false_targets) {
    require(anchor + t.delay_s + p.pulse_width_s <= window + 1e-15, ErrorKind::invalid_params,
            "false-target replica exceeds the receive window");
    weight += t.amplitude * t.amplitude;
  }
  ComplexSeries out = empty_window(p, t0_s);
  const double power = jam_power(p, j.jnr_db);
  if (power == 0.0 || weight == 0.0) return out;
  const double unit = std::sqrt(power / weight);
  for (const auto& t : j.false_targets)
    add_replica(out, p, anchor + t.delay_s, t.doppler_hz, unit * t.amplitude);
  return out;
}

ComplexSeries gen_noise(std::size_t length, double variance, double sample_rate_hz,
                        std::uint64_t seed) {
  ComplexSeries out;
  out.samples.resize(length);
  out.sample_rate_hz = sample_rate_hz;
  Rng rng(seed);
  const double sigma = std::sqrt(variance / 2.0);
  for (auto& v : out.samples) {
    const double re = gaussian(rng, 1.0);
    const double im = gaussian(rng, 1.0);
    v = cplx(sigma * re, sigma * im);
  }
  return out;
}

ComplexSeries add_awgn(const ComplexSeries& x, double snr_db, std::uint64_t seed) {
  require(x.size() > 0, ErrorKind::invalid_params, "add_awgn on an empty series");
  if (std::isinf(snr_db) && snr_db > 0) return x;
  const double ps = support_power(x);
  ComplexSeries out = x;
  if (ps == 0.0) return out;
  const auto noise = gen_noise(x.size(), ps / db_to_linear(snr_db), x.sample_rate_hz, seed);
  for (std::size_t n = 0; n < out.size(); ++n) out.samples[n] += noise.samples[n];
  return out;
}

EchoScene compose_scene(const RadarParams& p, const SceneRequest& req, std::uint64_t seed) {
  p.validate();
  EchoScene scene;
  scene.label = req.jamming.kind;
  scene.target_delay_s = req.target_delay_s;

  scene.clean_echo = empty_window(p, 0.0);
  add_replica(scene.clean_echo, p, req.target_delay_s, 0.0, 1.0);

  switch (req.jamming.kind) {
    case JammingKind::AJ:
      scene.jamming = gen_aj(p, req.jamming, req.aj_duration_s, derive_seed(seed, 1));
      break;
    case JammingKind::RFTJ:
      scene.jamming = gen_rftj(p, req.jamming);
      break;
    case JammingKind::RDFTJ:
      scene.jamming = gen_rdftj(p, req.jamming);
      break;
  }

  scene.noise = gen_noise(p.window_samples(), p.noise_power(), p.sample_rate_hz, derive_seed(seed, 2));
  scene.noise.carrier_hz = p.carrier_hz;

  scene.composite = scene.clean_echo;
  for (std::size_t n = 0; n < scene.composite.size(); ++n)
    scene.composite.samples[n] =
        scene.clean_echo.samples[n] + scene.jamming.samples[n] + scene.noise.samples[n];
  return scene;
}

}  // namespace jamlab::signal_forge
