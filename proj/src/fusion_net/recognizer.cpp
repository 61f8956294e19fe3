#include "jamlab/fusion_net/recognizer.hpp"

#include "jamlab/common/error.hpp"

namespace jamlab::fusion_net {

void RecognizerConfig::validate() const {
  require(classes == 3, ErrorKind::invalid_config, "the recognizer has exactly three classes");
  require(image_side >= 8 && image_side % 4 == 0, ErrorKind::invalid_config, "image_side must be a multiple of 4");
  require(attention_heads > 0 && head_dim * attention_heads == model_width, ErrorKind::invalid_config,
          "head_dim * attention_heads must equal model_width");
  require(token_pool > 0 && (image_side / 4) % token_pool == 0, ErrorKind::invalid_config,
          "token_pool must divide the feature map side image_side / 4");
  require(stem_channels > 0 && tf_mid_channels > 0 && tf_units > 0 && time_channels > 0 && time_res_blocks > 0 &&
              classifier_hidden > 0,
          ErrorKind::invalid_config, "layer widths and repeats must be positive");
  for (double p : {time_stem_dropout, residual_dropout, classifier_dropout})
    require(p >= 0.0 && p < 1.0, ErrorKind::invalid_config, "dropout must lie in [0, 1)");
}

RecognizerBatch make_batch(const std::vector<const tf_atlas::SceneImages*>& scenes) {
  require(!scenes.empty(), ErrorKind::empty_batch, "empty recognizer batch");
  const std::size_t n = scenes.size(), side = scenes[0]->stft.side, area = side * side;
  std::vector<double> stft(n * area), spwvd(n * area), time(n * 2 * area);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = *scenes[i];
    require(s.stft.side == side && s.spwvd.side == side && s.time_planes.size() == 2 * area,
            ErrorKind::shape_mismatch, "scene images differ in size");
    std::copy(s.stft.pixels.begin(), s.stft.pixels.end(), stft.begin() + std::ptrdiff_t(i * area));
    std::copy(s.spwvd.pixels.begin(), s.spwvd.pixels.end(), spwvd.begin() + std::ptrdiff_t(i * area));
    std::copy(s.time_planes.begin(), s.time_planes.end(), time.begin() + std::ptrdiff_t(i * 2 * area));
  }
  return {Tensor::from({n, 1, side, side}, std::move(stft)), Tensor::from({n, 1, side, side}, std::move(spwvd)),
          Tensor::from({n, 2, side, side}, std::move(time))};
}

Recognizer::TfBranch Recognizer::make_tf_branch(const std::string& name, Rng& rng) {
  TfBranch b;
  b.stem = Conv2d(params_, name + ".stem", 1, cfg_.stem_channels, 7, 2, 3, rng);
  std::size_t in = cfg_.stem_channels;
  for (std::size_t u = 0; u < cfg_.tf_units; ++u) {
    const std::string p = name + ".unit" + std::to_string(u);
    Bottleneck unit;
    unit.reduce = Conv2d(params_, p + ".reduce", in, cfg_.tf_mid_channels, 1, 1, 0, rng);
    unit.spatial = Conv2d(params_, p + ".spatial", cfg_.tf_mid_channels, cfg_.tf_mid_channels, 3, 1, 1, rng);
    unit.expand = Conv2d(params_, p + ".expand", cfg_.tf_mid_channels, cfg_.model_width, 1, 1, 0, rng);
    if (in != cfg_.model_width) unit.proj = Conv2d(params_, p + ".proj", in, cfg_.model_width, 1, 1, 0, rng);
    b.units.push_back(unit);
    in = cfg_.model_width;
  }
  return b;
}

Recognizer::Recognizer(const RecognizerConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(derive_seed(seed, 0x1417));
  stft_branch_ = make_tf_branch("tf_stft", rng);
  spwvd_branch_ = make_tf_branch("tf_spwvd", rng);
  tf_fuse_ = Conv2d(params_, "tf_fuse", 2 * cfg_.model_width, cfg_.model_width, 1, 1, 0, rng);

  time_stem_ = Conv2d(params_, "time.stem", 2, cfg_.stem_channels, 7, 2, 3, rng);
  std::size_t in = cfg_.stem_channels;
  for (std::size_t k = 0; k < cfg_.time_res_blocks; ++k) {
    const std::string p = "time.block" + std::to_string(k);
    ResBlock blk;
    blk.conv = Conv2d(params_, p + ".conv", in, cfg_.time_channels, 3, 1, 1, rng);
    if (in != cfg_.time_channels) blk.proj = Conv2d(params_, p + ".proj", in, cfg_.time_channels, 1, 1, 0, rng);
    time_blocks_.push_back(blk);
    in = cfg_.time_channels;
  }
  time_head_ = Conv2d(params_, "time.head", cfg_.time_channels, cfg_.model_width, 1, 1, 0, rng);

  attn_time_ = MultiHeadAttention(params_, "attn.time_q", cfg_.model_width, cfg_.attention_heads, rng);
  attn_tf_ = MultiHeadAttention(params_, "attn.tf_q", cfg_.model_width, cfg_.attention_heads, rng);
  cls_hidden_ = Linear(params_, "cls.hidden", 2 * cfg_.model_width, cfg_.classifier_hidden, rng);
  cls_out_ = Linear(params_, "cls.out", cfg_.classifier_hidden, cfg_.classes, rng, Init::glorot);
}

Tensor Recognizer::run_tf_branch(const TfBranch& b, const Tensor& x, bool training, Rng& rng) const {
  Tensor y = maxpool2d(relu(b.stem(x)), 3, 2, 1);
  for (const auto& u : b.units) {
    Tensor r = relu(u.reduce(y));
    r = dropout(relu(u.spatial(r)), cfg_.residual_dropout, rng, training);
    r = u.expand(r);
    y = relu(add(r, u.proj.w.defined() ? u.proj(y) : y));
  }
  return y;
}

Tensor Recognizer::run_time_branch(const Tensor& x, bool training, Rng& rng) const {
  Tensor y = maxpool2d(dropout(relu(time_stem_(x)), cfg_.time_stem_dropout, rng, training), 3, 2, 1);
  for (const auto& blk : time_blocks_) y = relu(add(blk.conv(y), blk.proj.w.defined() ? blk.proj(y) : y));
  y = dropout(y, cfg_.residual_dropout, rng, training);
  return relu(time_head_(y));
}

Tensor Recognizer::forward(const RecognizerBatch& batch, bool training, Rng& rng) const {
  const std::size_t s = cfg_.image_side;
  require(batch.stft.rank() == 4 && batch.stft.dim(1) == 1 && batch.stft.dim(2) == s && batch.stft.dim(3) == s &&
              batch.spwvd.shape() == batch.stft.shape() && batch.time.rank() == 4 &&
              batch.time.dim(0) == batch.stft.dim(0) && batch.time.dim(1) == 2 && batch.time.dim(2) == s &&
              batch.time.dim(3) == s,
          ErrorKind::shape_mismatch, "recognizer inputs do not match image_side " + std::to_string(s));

  const Tensor f_tf = relu(tf_fuse_(concat({run_tf_branch(stft_branch_, batch.stft, training, rng),
                                            run_tf_branch(spwvd_branch_, batch.spwvd, training, rng)},
                                           1)));
  const Tensor f_t = run_time_branch(batch.time, training, rng);

  auto tokens = [&](const Tensor& f) {
    return map_to_tokens(cfg_.token_pool > 1 ? avgpool2d(f, cfg_.token_pool) : f);
  };
  const Tensor tok_t = tokens(f_t);
  const Tensor tok_tf = tokens(f_tf);
  const Tensor a_t = attn_time_(tok_t, tok_tf);
  const Tensor a_tf = attn_tf_(tok_tf, tok_t);

  const Tensor fused = concat({gap(channel_gate(a_t, f_t)), gap(channel_gate(a_tf, f_tf))}, 1);
  const Tensor hidden = dropout(relu(cls_hidden_(fused)), cfg_.classifier_dropout, rng, training);
  return cls_out_(hidden);
}

}  // namespace jamlab::fusion_net
