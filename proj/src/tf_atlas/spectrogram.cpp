#include "jamlab/tf_atlas/spectrogram.hpp"

#include <algorithm>
#include <cmath>

#include "jamlab/common/error.hpp"
#include "jamlab/common/fft.hpp"

namespace jamlab::tf_atlas {
namespace {

// Row r of an fftshifted spectrum holds FFT bin (r + ceil(N/2)) mod N.
std::size_t shifted_bin(std::size_t row, std::size_t n) { return (row + (n + 1) / 2) % n; }

std::vector<double> shifted_axis(std::size_t n, double bin_hz) {
  std::vector<double> axis(n);
  for (std::size_t r = 0; r < n; ++r) axis[r] = (double(r) - double(n / 2)) * bin_hz;
  return axis;
}

std::vector<double> make_window(WindowShape shape, std::size_t len) {
  return shape == WindowShape::hamming ? hamming(len) : std::vector<double>(len, 1.0);
}

}  // namespace

Spectrogram stft(const ComplexSeries& x, std::size_t win_len, std::size_t hop, std::size_t fft_len) {
  require(hop > 0 && hop <= win_len && win_len <= fft_len && fft_len <= x.size(), ErrorKind::invalid_params,
          "stft requires 0 < hop <= win_len <= fft_len <= length");
  require(x.sample_rate_hz > 0.0, ErrorKind::invalid_params, "stft needs a sample rate");

  Spectrogram s;
  s.kind = TfKind::stft_mag;
  s.n_time = (x.size() - win_len) / hop + 1;
  s.n_freq = fft_len;
  s.values.resize(s.n_time * s.n_freq);
  s.freq_axis_hz = shifted_axis(fft_len, x.sample_rate_hz / double(fft_len));
  s.time_axis_s.resize(s.n_time);

  const auto w = hamming(win_len);
  std::vector<cplx> frame(fft_len);
  for (std::size_t c = 0; c < s.n_time; ++c) {
    const std::size_t start = c * hop;
    std::fill(frame.begin(), frame.end(), cplx{});
    for (std::size_t m = 0; m < win_len; ++m) frame[m] = x.samples[start + m] * w[m];
    fft_inplace(frame);
    for (std::size_t r = 0; r < fft_len; ++r) s.at(c, r) = std::abs(frame[shifted_bin(r, fft_len)]);
    s.time_axis_s[c] = x.t0_s + (double(start) + 0.5 * double(win_len - 1)) / x.sample_rate_hz;
  }
  return s;
}

Spectrogram spwvd(const ComplexSeries& x, const SpwvdOptions& opts, double* max_imag) {
  const std::size_t len = x.size();
  require(opts.h_len % 2 == 1 && opts.g_len % 2 == 1, ErrorKind::invalid_params, "spwvd windows must be odd");
  require(opts.h_len <= len && opts.g_len <= len, ErrorKind::invalid_params, "spwvd windows exceed the signal");
  require(opts.decimation > 0, ErrorKind::invalid_params, "spwvd decimation must be positive");
  require(x.sample_rate_hz > 0.0, ErrorKind::invalid_params, "spwvd needs a sample rate");
  std::size_t n_freq = opts.n_freq;
  if (n_freq == 0) {
    n_freq = 1;
    while (n_freq < opts.h_len) n_freq *= 2;
  }
  require(n_freq >= opts.h_len, ErrorKind::invalid_params, "lag FFT shorter than the lag window");

  const auto lh = std::ptrdiff_t(opts.h_len / 2);
  const auto lg = std::ptrdiff_t(opts.g_len / 2);
  const auto h = make_window(opts.h_shape, opts.h_len);
  auto g = make_window(opts.g_shape, opts.g_len);
  double g_sum = 0.0;
  for (double v : g) g_sum += v;
  for (double& v : g) v /= g_sum;

  Spectrogram s;
  s.kind = TfKind::spwvd;
  s.n_time = (len + opts.decimation - 1) / opts.decimation;
  s.n_freq = n_freq;
  s.values.resize(s.n_time * n_freq);
  s.freq_axis_hz = shifted_axis(n_freq, x.sample_rate_hz / (2.0 * double(n_freq)));
  s.time_axis_s.resize(s.n_time);

  const auto n_len = std::ptrdiff_t(len);
  auto sample = [&](std::ptrdiff_t i) { return (i >= 0 && i < n_len) ? x.samples[std::size_t(i)] : cplx{}; };

  double worst_imag = 0.0;
  std::vector<cplx> lag(n_freq);
  for (std::size_t c = 0; c < s.n_time; ++c) {
    const auto n = std::ptrdiff_t(c * opts.decimation);
    std::fill(lag.begin(), lag.end(), cplx{});
    for (std::ptrdiff_t tau = 0; tau <= lh; ++tau) {
      // The negative lag is the conjugate of the positive one.
      cplx acc{};
      for (std::ptrdiff_t p = -lg; p <= lg; ++p)
        acc += g[std::size_t(p + lg)] * sample(n + p + tau) * std::conj(sample(n + p - tau));
      lag[std::size_t(tau)] = h[std::size_t(lh + tau)] * acc;
      if (tau > 0) lag[n_freq - std::size_t(tau)] = h[std::size_t(lh - tau)] * std::conj(acc);
    }
    fft_inplace(lag);
    for (std::size_t r = 0; r < n_freq; ++r) {
      const cplx v = lag[shifted_bin(r, n_freq)];
      s.at(c, r) = v.real();
      worst_imag = std::max(worst_imag, std::abs(v.imag()));
    }
    s.time_axis_s[c] = x.time_of(std::size_t(n));
  }
  if (max_imag) *max_imag = worst_imag;
  return s;
}

}  // namespace jamlab::tf_atlas
