#include "jamlab/tf_atlas/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "jamlab/common/error.hpp"

namespace jamlab::tf_atlas {

std::vector<double> resample_bilinear(const std::vector<double>& grid, std::size_t rows, std::size_t cols,
                                      std::size_t out_rows, std::size_t out_cols) {
  require(rows > 0 && cols > 0 && grid.size() == rows * cols, ErrorKind::invalid_params,
          "resample needs a nonempty grid");
  std::vector<double> out(out_rows * out_cols);
  auto coord = [](std::size_t i, std::size_t n_out, std::size_t n_in) {
    return n_out > 1 ? double(i) * double(n_in - 1) / double(n_out - 1) : 0.0;
  };
  for (std::size_t r = 0; r < out_rows; ++r) {
    const double y = coord(r, out_rows, rows);
    const auto y0 = std::min(std::size_t(y), rows - 1);
    const auto y1 = std::min(y0 + 1, rows - 1);
    const double fy = y - double(y0);
    for (std::size_t c = 0; c < out_cols; ++c) {
      const double x = coord(c, out_cols, cols);
      const auto x0 = std::min(std::size_t(x), cols - 1);
      const auto x1 = std::min(x0 + 1, cols - 1);
      const double fx = x - double(x0);
      const double top = (1.0 - fx) * grid[y0 * cols + x0] + fx * grid[y0 * cols + x1];
      const double bottom = (1.0 - fx) * grid[y1 * cols + x0] + fx * grid[y1 * cols + x1];
      out[r * out_cols + c] = (1.0 - fy) * top + fy * bottom;
    }
  }
  return out;
}

TfImage to_image(const Spectrogram& s, std::size_t side) {
  require(s.n_time > 0 && s.n_freq > 0 && side > 0, ErrorKind::invalid_params, "to_image on an empty grid");
  TfImage img;
  img.side = side;
  img.pixels = resample_bilinear(s.values, s.n_time, s.n_freq, side, side);
  const auto [lo, hi] = std::minmax_element(img.pixels.begin(), img.pixels.end());
  img.source_min = *lo;
  img.source_max = *hi;
  const double range = img.source_max - img.source_min;
  for (double& v : img.pixels) v = range > 0.0 ? std::clamp((v - img.source_min) / range, 0.0, 1.0) : 0.0;
  return img;
}

void write_pgm(const std::filesystem::path& path, const TfImage& image) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(bool(out), ErrorKind::io, "cannot open " + path.string());
  out << "P5\n" << image.side << ' ' << image.side << "\n255\n";
  for (double v : image.pixels) out.put(char(std::uint8_t(std::lround(255.0 * std::clamp(v, 0.0, 1.0)))));
  require(bool(out), ErrorKind::io, "write failed for " + path.string());
}

}  // namespace jamlab::tf_atlas
