#include "jamlab/tf_atlas/features.hpp"

#include <algorithm>
#include <cmath>

#include "jamlab/common/error.hpp"

namespace jamlab::tf_atlas {

std::vector<double> time_raster(const ComplexSeries& x, std::size_t side) {
  require(x.size() > 0, ErrorKind::invalid_params, "time raster of an empty series");
  const auto width = std::size_t(std::ceil(std::sqrt(double(x.size()))));
  std::vector<double> re(width * width, 0.0), im(width * width, 0.0);
  double peak = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    re[n] = x.samples[n].real();
    im[n] = x.samples[n].imag();
    peak = std::max({peak, std::abs(re[n]), std::abs(im[n])});
  }
  if (peak > 0.0) {
    for (double& v : re) v /= peak;
    for (double& v : im) v /= peak;
  }
  auto planes = resample_bilinear(re, width, width, side, side);
  const auto q = resample_bilinear(im, width, width, side, side);
  planes.insert(planes.end(), q.begin(), q.end());
  return planes;
}

SceneImages make_scene_images(const ComplexSeries& x, const FeatureOptions& opts) {
  SceneImages out;
  Spectrogram mag = stft(x, opts.stft_win, opts.stft_hop, opts.stft_fft);
  const double top = *std::max_element(mag.values.begin(), mag.values.end());
  const double floor = top > 0.0 ? 1e-9 * top : 1e-300;
  for (double& v : mag.values) v = 20.0 * std::log10(v + floor);
  out.stft = to_image(mag, opts.side);
  out.spwvd = to_image(spwvd(x, opts.spwvd), opts.side);
  out.time_planes = time_raster(x, opts.side);
  return out;
}

}  // namespace jamlab::tf_atlas
