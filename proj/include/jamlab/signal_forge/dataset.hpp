#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "jamlab/common/rng.hpp"
#include "jamlab/signal_forge/types.hpp"
#include "jamlab/signal_forge/waveforms.hpp"

namespace jamlab::signal_forge {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

enum class Split { train, val, test };

const char* to_string(Split s);
Split split_from_string(const std::string& name);

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;

  static SplitFractions preset(const std::string& name);  // "80/10/10" or "30/60/10"
};

// Default ranges follow the radar/jammer parameter table: 28 MHz LFM at 1 GHz,
// JNR 10..35 dB, 60 MHz AJ band, RFTJ delay 10..20 us, RDFTJ 3..5 targets in
// -15..15 us.
struct DatasetConfig {
  std::array<std::size_t, kJammingKinds> counts{300, 300, 300};
  RadarParams radar;
  Range jnr_db{10.0, 35.0};
  Range aj_bandwidth_hz{60e6, 60e6};
  Range aj_center_offset_hz{-5e6, 5e6};
  Range aj_duration_s{30e-6, 50e-6};
  Range rftj_delay_s{10e-6, 20e-6};
  Range rdftj_delay_s{-15e-6, 15e-6};
  std::size_t rdftj_min_targets = 3;
  std::size_t rdftj_max_targets = 5;
  Range doppler_hz{-5e3, 5e3};
  Range target_delay_s{5e-6, 35e-6};
  SplitFractions split;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SceneRecord {
  std::size_t id = 0;
  std::string file;
  JammingKind label = JammingKind::AJ;
  Split split = Split::train;
  std::size_t length = 0;
  SceneRequest request;
};

struct Dataset {
  std::filesystem::path dir;
  DatasetConfig config;
  std::vector<SceneRecord> scenes;

  std::array<std::size_t, kJammingKinds> class_histogram() const;
  std::vector<const SceneRecord*> in_split(Split s) const;
};

// Draws one scene's parameters for the given label from the config ranges.
SceneRequest sample_scene_request(const DatasetConfig& cfg, JammingKind label, Rng& rng);

// Writes manifest.json and one sceneNNNN.cpx (composite echo) per scene.
// Each scene uses the child seed derive_seed(cfg.seed, scene index), so the
// output is independent of worker count.
Dataset gen_dataset(const DatasetConfig& cfg, const std::filesystem::path& dir);

Dataset load_dataset(const std::filesystem::path& dir);

ComplexSeries load_scene(const Dataset& ds, const SceneRecord& rec);

}  // namespace jamlab::signal_forge
