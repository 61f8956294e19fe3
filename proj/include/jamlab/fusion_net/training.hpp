#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "jamlab/fusion_net/recognizer.hpp"
#include "jamlab/signal_forge/dataset.hpp"
#include "jamlab/tf_atlas/features.hpp"

namespace jamlab::fusion_net {

// Precomputed recognizer inputs for every scene of a dataset.
struct FeatureBank {
  std::vector<tf_atlas::SceneImages> images;
  std::vector<int> labels;
  std::vector<signal_forge::Split> splits;

  std::vector<std::size_t> indices(signal_forge::Split s) const;
};

FeatureBank build_feature_bank(const signal_forge::Dataset& ds, const tf_atlas::FeatureOptions& opts);

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  double lr = 1e-3;
  std::uint64_t seed = 1;
  // Restore the parameters of the epoch with the best validation OA.
  bool keep_best = true;
  // Stop once validation OA reaches this value; > 1 disables.
  double stop_at_val_oa = 2.0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_oa = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_val_oa = 0.0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

TrainResult train_recognizer(Recognizer& net, const FeatureBank& bank, const TrainConfig& cfg,
                             const EpochCallback& on_epoch = {});

// Argmax predictions in eval mode.
std::vector<int> predict(const Recognizer& net, const FeatureBank& bank, const std::vector<std::size_t>& which,
                         std::size_t batch_size = 32);
std::vector<int> predict_images(const Recognizer& net, const std::vector<const tf_atlas::SceneImages*>& images,
                                std::size_t batch_size = 32);

double overall_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

// Columns: epoch,train_loss,val_oa.
void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history);

}  // namespace jamlab::fusion_net
