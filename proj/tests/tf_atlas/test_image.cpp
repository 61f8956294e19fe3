#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "jamlab/common/error.hpp"
#include "jamlab/common/rng.hpp"
#include "jamlab/signal_forge/waveforms.hpp"
#include "jamlab/tf_atlas/features.hpp"

using namespace jamlab;
using namespace jamlab::tf_atlas;

namespace {

Spectrogram grid(std::size_t rows, std::size_t cols, std::vector<double> v) {
  Spectrogram s;
  s.n_time = rows;
  s.n_freq = cols;
  s.values = std::move(v);
  return s;
}

}  // namespace

TEST_CASE("to_image: constant grid maps to zeros") {
  const auto img = to_image(grid(5, 7, std::vector<double>(35, 3.25)), 16);
  CHECK(img.pixels.size() == 256);
  CHECK(std::all_of(img.pixels.begin(), img.pixels.end(), [](double v) { return v == 0.0; }));
}

TEST_CASE("to_image: normalised side x side input is returned unchanged") {
  Rng rng(7);
  std::vector<double> v(64 * 64);
  for (double& e : v) e = uniform(rng, 0.0, 1.0);
  v[5] = 0.0;
  v[99] = 1.0;
  const auto img = to_image(grid(64, 64, v), 64);
  for (std::size_t i = 0; i < v.size(); ++i) REQUIRE(img.pixels[i] == doctest::Approx(v[i]).epsilon(1e-14));

  // Idempotence: feeding the image back changes nothing.
  const auto again = to_image(grid(64, 64, img.pixels), 64);
  CHECK(again.pixels == img.pixels);
}

TEST_CASE("to_image: 2x2 checkerboard to 4x4 matches the bilinear weights") {
  // Corner-aligned: output index i maps to input coordinate i / 3.
  const auto img = to_image(grid(2, 2, {1.0, 0.0, 0.0, 1.0}), 4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) {
      const double y = double(r) / 3.0, x = double(c) / 3.0;
      const double expected = (1 - y) * (1 - x) * 1.0 + (1 - y) * x * 0.0 + y * (1 - x) * 0.0 + y * x * 1.0;
      CHECK(img.at(r, c) == doctest::Approx(expected).epsilon(1e-12));
    }
  // Hand-evaluated centre pixel: (2/3)(2/3) + (1/3)(1/3) = 5/9.
  CHECK(img.at(1, 1) == doctest::Approx(5.0 / 9.0));
  CHECK(img.at(1, 2) == doctest::Approx(4.0 / 9.0));
}

TEST_CASE("to_image: pixels stay in [0, 1] for arbitrary grids") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t rows = 1 + uniform_index(rng, 40), cols = 1 + uniform_index(rng, 40);
    std::vector<double> v(rows * cols);
    for (double& e : v) e = uniform(rng, -1e3, 1e3);
    const auto img = to_image(grid(rows, cols, v), 32);
    REQUIRE(std::all_of(img.pixels.begin(), img.pixels.end(), [](double p) { return p >= 0.0 && p <= 1.0; }));
  }
  CHECK_THROWS_AS(to_image(Spectrogram{}, 8), Error);
}

TEST_CASE("write_pgm: binary P5 layout") {
  const auto img = to_image(grid(2, 2, {0.0, 1.0, 0.5, 0.25}), 2);
  const auto path = std::filesystem::temp_directory_path() / "jamlab_img.pgm";
  write_pgm(path, img);
  std::ifstream in(path, std::ios::binary);
  const std::string bytes{std::istreambuf_iterator<char>(in), {}};
  const std::string header = "P5\n2 2\n255\n";
  REQUIRE(bytes.size() == header.size() + 4);
  CHECK(bytes.substr(0, header.size()) == header);
  CHECK(std::uint8_t(bytes[header.size() + 0]) == 0);
  CHECK(std::uint8_t(bytes[header.size() + 1]) == 255);
  CHECK(std::uint8_t(bytes[header.size() + 2]) == 128);
  CHECK(std::uint8_t(bytes[header.size() + 3]) == 64);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_pgm("/nonexistent_dir/x.pgm", img), Error);
}

TEST_CASE("make_scene_images: shapes and ranges for a composite scene") {
  signal_forge::RadarParams p;
  signal_forge::SceneRequest req;
  req.jamming.kind = signal_forge::JammingKind::RFTJ;
  req.jamming.delay_s = 12e-6;
  const auto scene = signal_forge::compose_scene(p, req, 99);
  const auto imgs = make_scene_images(scene.composite, FeatureOptions{});
  CHECK(imgs.stft.side == 64);
  CHECK(imgs.spwvd.pixels.size() == 64 * 64);
  REQUIRE(imgs.time_planes.size() == 2 * 64 * 64);
  CHECK(std::all_of(imgs.time_planes.begin(), imgs.time_planes.end(),
                    [](double v) { return v >= -1.0 && v <= 1.0; }));
  const auto [lo, hi] = std::minmax_element(imgs.stft.pixels.begin(), imgs.stft.pixels.end());
  CHECK(*lo == 0.0);
  CHECK(*hi == 1.0);
}

TEST_CASE("time_raster: corners carry the first sample") {
  ComplexSeries x;
  x.sample_rate_hz = 1.0;
  x.samples = {{2.0, -1.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.5}};
  const auto planes = time_raster(x, 3);
  REQUIRE(planes.size() == 18);
  CHECK(planes[0] == doctest::Approx(1.0));
  CHECK(planes[9] == doctest::Approx(-0.5));
  CHECK(planes[8] == doctest::Approx(0.5));
  CHECK(planes[17] == doctest::Approx(0.25));
}
