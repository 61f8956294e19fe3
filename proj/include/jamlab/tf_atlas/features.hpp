#pragma once

#include <cstddef>
#include <vector>

#include "jamlab/tf_atlas/image.hpp"

namespace jamlab::tf_atlas {

struct FeatureOptions {
  std::size_t side = 64;
  std::size_t stft_win = 128;
  std::size_t stft_hop = 32;
  std::size_t stft_fft = 256;
  SpwvdOptions spwvd;
};

// Recognizer inputs for one receive window.
struct SceneImages {
  TfImage stft;   // log-magnitude STFT
  TfImage spwvd;  // raw SPWVD
  // I and Q planes, each side x side, scaled by the peak |I|,|Q| into [-1, 1].
  std::vector<double> time_planes;
};

// Lays the window out as a ceil(sqrt(len))-wide zero-padded raster per
// component and resamples each plane to side x side.
std::vector<double> time_raster(const ComplexSeries& x, std::size_t side);

SceneImages make_scene_images(const ComplexSeries& x, const FeatureOptions& opts);

}  // namespace jamlab::tf_atlas
