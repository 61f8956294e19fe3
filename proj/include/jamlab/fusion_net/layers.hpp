#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "jamlab/common/rng.hpp"
#include "jamlab/fusion_net/ops.hpp"

namespace jamlab::fusion_net {

// Named trainable leaves, in registration order.
class ParamSet {
 public:
  Tensor add(const std::string& name, Tensor t);
  const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::size_t scalar_count() const;
  Tensor find(const std::string& name) const;
  void zero_grad();
  // Bit-exact value copy; names and shapes must match.
  void copy_from(const ParamSet& other);

 private:
  std::vector<std::pair<std::string, Tensor>> items_;
};

enum class Init { he, glorot, zero };

Tensor init_tensor(Shape shape, std::size_t fan_in, std::size_t fan_out, Init init, Rng& rng);

struct Linear {
  Tensor w, b;
  Linear() = default;
  Linear(ParamSet& ps, const std::string& name, std::size_t in, std::size_t out, Rng& rng, Init init = Init::he);
  Tensor operator()(const Tensor& x) const { return linear(x, w, b); }
};

struct Conv2d {
  Tensor w, b;
  std::size_t stride = 1, pad = 0;
  Conv2d() = default;
  Conv2d(ParamSet& ps, const std::string& name, std::size_t in, std::size_t out, std::size_t kernel,
         std::size_t stride, std::size_t pad, Rng& rng);
  Tensor operator()(const Tensor& x) const { return conv2d(x, w, b, stride, pad); }
};

// Projections around attention_core; queries from one input, keys and
// values from the other.
struct MultiHeadAttention {
  Linear q, k, v, o;
  std::size_t heads = 1;
  MultiHeadAttention() = default;
  MultiHeadAttention(ParamSet& ps, const std::string& name, std::size_t width, std::size_t heads, Rng& rng);
  Tensor operator()(const Tensor& query_tokens, const Tensor& kv_tokens) const;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(ParamSet& params, AdamConfig cfg = {});
  // Applies one update from the accumulated grads, then clears them.
  void step();
  long steps() const { return t_; }

 private:
  ParamSet& params_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  long t_ = 0;
};

// "FNET" | u32 version | records {u32 name_len, name, u32 rank, u32 dims[rank], f32 data[]}.
void save_checkpoint(const std::filesystem::path& path, const ParamSet& params);
// Every parameter in `params` must be present with a matching shape.
void load_checkpoint(const std::filesystem::path& path, ParamSet& params);

}  // namespace jamlab::fusion_net
