#include "jamlab/fusion_net/training.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "jamlab/common/error.hpp"
#include "jamlab/common/parallel.hpp"

namespace jamlab::fusion_net {

using signal_forge::Split;

std::vector<std::size_t> FeatureBank::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i)
    if (splits[i] == s) out.push_back(i);
  return out;
}

FeatureBank build_feature_bank(const signal_forge::Dataset& ds, const tf_atlas::FeatureOptions& opts) {
  FeatureBank bank;
  const std::size_t n = ds.scenes.size();
  bank.images.resize(n);
  parallel_for(n, [&](std::size_t i) {
    bank.images[i] = tf_atlas::make_scene_images(signal_forge::load_scene(ds, ds.scenes[i]), opts);
  });
  for (const auto& rec : ds.scenes) {
    bank.labels.push_back(int(rec.label));
    bank.splits.push_back(rec.split);
  }
  return bank;
}

std::vector<int> predict_images(const Recognizer& net, const std::vector<const tf_atlas::SceneImages*>& images,
                                std::size_t batch_size) {
  NoGradGuard guard;
  Rng unused(0);
  std::vector<int> out;
  for (std::size_t start = 0; start < images.size(); start += batch_size) {
    const std::size_t stop = std::min(images.size(), start + batch_size);
    std::vector<const tf_atlas::SceneImages*> chunk(images.begin() + std::ptrdiff_t(start),
                                                    images.begin() + std::ptrdiff_t(stop));
    const Tensor logits = net.forward(make_batch(chunk), false, unused);
    const std::size_t c = logits.dim(1);
    for (std::size_t r = 0; r < chunk.size(); ++r) {
      const double* z = logits.data().data() + r * c;
      out.push_back(int(std::max_element(z, z + c) - z));
    }
  }
  return out;
}

std::vector<int> predict(const Recognizer& net, const FeatureBank& bank, const std::vector<std::size_t>& which,
                         std::size_t batch_size) {
  std::vector<const tf_atlas::SceneImages*> images;
  for (auto i : which) images.push_back(&bank.images.at(i));
  return predict_images(net, images, batch_size);
}

double overall_accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  require(predicted.size() == truth.size() && !truth.empty(), ErrorKind::shape_mismatch,
          "prediction and label counts differ");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return double(hits) / double(truth.size());
}

TrainResult train_recognizer(Recognizer& net, const FeatureBank& bank, const TrainConfig& cfg,
                             const EpochCallback& on_epoch) {
  require(cfg.batch_size > 0 && cfg.epochs > 0, ErrorKind::invalid_config, "epochs and batch size must be positive");
  auto train = bank.indices(Split::train);
  const auto val = bank.indices(Split::val);
  require(!train.empty(), ErrorKind::missing_split, "dataset has no train split");
  require(!val.empty(), ErrorKind::missing_split, "dataset has no validation split");
  std::array<bool, 3> seen{};
  for (auto i : train)
    if (bank.labels[i] >= 0 && bank.labels[i] < 3) seen[std::size_t(bank.labels[i])] = true;
  require(seen[0] && seen[1] && seen[2], ErrorKind::missing_class, "train split lacks at least one class");

  std::vector<int> val_truth;
  for (auto i : val) val_truth.push_back(bank.labels[i]);

  Adam opt(net.params(), AdamConfig{cfg.lr});
  Rng rng(derive_seed(cfg.seed, 0x7EA1));
  TrainResult result;
  std::vector<std::vector<double>> best_values;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(train.begin(), train.end(), rng);
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t start = 0; start < train.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(train.size(), start + cfg.batch_size);
      std::vector<const tf_atlas::SceneImages*> images;
      std::vector<int> labels;
      for (std::size_t k = start; k < stop; ++k) {
        images.push_back(&bank.images[train[k]]);
        labels.push_back(bank.labels[train[k]]);
      }
      const Tensor loss = softmax_xent(net.forward(make_batch(images), true, rng), labels);
      require(std::isfinite(loss.item()), ErrorKind::numeric, "non-finite training loss");
      backward(loss);
      opt.step();
      loss_sum += loss.item() * double(labels.size());
      loss_count += labels.size();
    }
    EpochRecord rec{epoch, loss_sum / double(loss_count), overall_accuracy(predict(net, bank, val), val_truth)};
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (result.best_epoch == 0 || rec.val_oa > result.best_val_oa) {
      result.best_epoch = epoch;
      result.best_val_oa = rec.val_oa;
      best_values.clear();
      for (const auto& [_, t] : net.params().items()) best_values.push_back(t.data());
    }
    if (rec.val_oa >= cfg.stop_at_val_oa) break;
  }
  if (cfg.keep_best) {
    std::size_t k = 0;
    for (auto [_, t] : net.params().items()) t.data() = best_values[k++];
  }
  return result;
}

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history) {
  std::ofstream out(path, std::ios::trunc);
  require(bool(out), ErrorKind::io, "cannot write " + path.string());
  out << "epoch,train_loss,val_oa\n";
  char line[128];
  for (const auto& r : history) {
    std::snprintf(line, sizeof(line), "%zu,%.9g,%.9g\n", r.epoch, r.train_loss, r.val_oa);
    out << line;
  }
  require(bool(out), ErrorKind::io, "write failed for " + path.string());
}

}  // namespace jamlab::fusion_net
