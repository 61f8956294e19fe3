#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "jamlab/fusion_net/layers.hpp"
#include "jamlab/tf_atlas/features.hpp"

namespace jamlab::fusion_net {

struct RecognizerConfig {
  std::size_t image_side = 64;
  std::size_t stem_channels = 16;
  // TF branch bottleneck unit: 1x1 -> mid, 3x3 mid -> mid, 1x1 -> out.
  std::size_t tf_mid_channels = 32;
  std::size_t tf_units = 3;
  std::size_t time_channels = 32;
  std::size_t time_res_blocks = 5;
  // Width of both feature maps entering attention.
  std::size_t model_width = 64;
  // Mean pooling of the feature maps before they become attention tokens.
  std::size_t token_pool = 2;
  std::size_t attention_heads = 4;
  std::size_t head_dim = 16;
  std::size_t classifier_hidden = 64;
  double time_stem_dropout = 0.4;
  double residual_dropout = 0.5;
  double classifier_dropout = 0.3;
  std::size_t classes = 3;

  void validate() const;
};

// Inputs for a batch of N scenes.
struct RecognizerBatch {
  Tensor stft;   // [N,1,S,S]
  Tensor spwvd;  // [N,1,S,S]
  Tensor time;   // [N,2,S,S]
};

RecognizerBatch make_batch(const std::vector<const tf_atlas::SceneImages*>& scenes);

class Recognizer {
 public:
  Recognizer(const RecognizerConfig& cfg, std::uint64_t seed);

  // Logits [N, classes]. Dropout is active only when training.
  Tensor forward(const RecognizerBatch& batch, bool training, Rng& rng) const;

  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }
  const RecognizerConfig& config() const { return cfg_; }
  const Linear& output_layer() const { return cls_out_; }

 private:
  struct Bottleneck {
    Conv2d reduce, spatial, expand, proj;
  };
  struct TfBranch {
    Conv2d stem;
    std::vector<Bottleneck> units;
  };
  struct ResBlock {
    Conv2d conv, proj;
  };

  TfBranch make_tf_branch(const std::string& name, Rng& rng);
  Tensor run_tf_branch(const TfBranch& b, const Tensor& x, bool training, Rng& rng) const;
  Tensor run_time_branch(const Tensor& x, bool training, Rng& rng) const;

  RecognizerConfig cfg_;
  ParamSet params_;
  TfBranch stft_branch_, spwvd_branch_;
  Conv2d tf_fuse_;
  Conv2d time_stem_;
  std::vector<ResBlock> time_blocks_;
  Conv2d time_head_;
  MultiHeadAttention attn_time_, attn_tf_;
  Linear cls_hidden_, cls_out_;
};

}  // namespace jamlab::fusion_net
