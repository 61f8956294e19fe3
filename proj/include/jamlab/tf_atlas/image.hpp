#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "jamlab/tf_atlas/spectrogram.hpp"

namespace jamlab::tf_atlas {

struct TfImage {
  std::size_t side = 0;
  std::vector<double> pixels;  // row-major side x side, values in [0, 1]
  double source_min = 0.0;
  double source_max = 0.0;

  double at(std::size_t r, std::size_t c) const { return pixels[r * side + c]; }
};

// Bilinear resample of a rows x cols grid to out_rows x out_cols using
// corner-aligned sampling (output corners hit input corners exactly).
std::vector<double> resample_bilinear(const std::vector<double>& grid, std::size_t rows, std::size_t cols,
                                      std::size_t out_rows, std::size_t out_cols);

// Bilinear resample to side x side then per-image min-max normalisation.
// A constant grid maps to all zeros.
TfImage to_image(const Spectrogram& s, std::size_t side);

// Binary PGM (P5), 8-bit, row-major, pixel = round(255 * value).
void write_pgm(const std::filesystem::path& path, const TfImage& image);

}  // namespace jamlab::tf_atlas
