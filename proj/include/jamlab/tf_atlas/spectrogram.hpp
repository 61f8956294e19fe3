#pragma once

#include <cstddef>
#include <vector>

#include "jamlab/signal_forge/types.hpp"

namespace jamlab::tf_atlas {

using signal_forge::ComplexSeries;

enum class TfKind { stft_mag, spwvd };

// Time-major grid: values[t * n_freq + f]. Frequency rows ascend from the
// most negative baseband frequency.
struct Spectrogram {
  std::size_t n_time = 0;
  std::size_t n_freq = 0;
  std::vector<double> values;
  std::vector<double> time_axis_s;
  std::vector<double> freq_axis_hz;
  TfKind kind = TfKind::stft_mag;

  double at(std::size_t t, std::size_t f) const { return values[t * n_freq + f]; }
  double& at(std::size_t t, std::size_t f) { return values[t * n_freq + f]; }
};

// |X(w, t)| with a Hamming analysis window. Column c covers samples
// [c * hop, c * hop + win_len); floor((len - win_len) / hop) + 1 columns.
Spectrogram stft(const ComplexSeries& x, std::size_t win_len = 128, std::size_t hop = 32,
                 std::size_t fft_len = 256);

enum class WindowShape { hamming, rectangular };

struct SpwvdOptions {
  std::size_t h_len = 127;  // lag (frequency-smoothing) window, odd
  std::size_t g_len = 31;   // time-smoothing window, odd
  std::size_t decimation = 16;
  // Lag FFT length; 0 selects the smallest power of two >= h_len.
  std::size_t n_freq = 0;
  WindowShape h_shape = WindowShape::hamming;
  WindowShape g_shape = WindowShape::hamming;
};

// Discrete smoothed pseudo Wigner-Ville distribution
//   S(n, k) = sum_tau h(tau) sum_p g(p) x(n+p+tau) x*(n+p-tau) e^{-j 2 pi k tau / N}
// with g normalised to unit sum, evaluated every `decimation` samples.
// Bin spacing is fs / (2N). When max_imag is given it receives the largest
// imaginary residue discarded from the lag transform.
Spectrogram spwvd(const ComplexSeries& x, const SpwvdOptions& opts, double* max_imag = nullptr);

inline Spectrogram spwvd(const ComplexSeries& x, std::size_t h_len, std::size_t g_len) {
  SpwvdOptions opts;
  opts.h_len = h_len;
  opts.g_len = g_len;
  return spwvd(x, opts);
}

}  // namespace jamlab::tf_atlas
