#pragma once

#include <cstddef>
#include <vector>

#include "jamlab/common/rng.hpp"
#include "jamlab/fusion_net/tensor.hpp"

namespace jamlab::fusion_net {

// Elementwise, identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor sum(const Tensor& a);

// a [M,K] x b [K,N].
Tensor matmul(const Tensor& a, const Tensor& b);
// Batched: a [B,M,K] x b [B,K,N], or b [B,N,K] transposed when transpose_b.
Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b = false);
// x [..., in], w [out, in], b [out] -> [..., out].
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

// x [N,C,H,W], w [F,C,kh,kw], b [F].
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, std::size_t stride = 1, std::size_t pad = 0);
Tensor maxpool2d(const Tensor& x, std::size_t kernel, std::size_t stride, std::size_t pad = 0);
// Non-overlapping k x k mean pooling; H and W must be multiples of k.
Tensor avgpool2d(const Tensor& x, std::size_t kernel);

Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
// Inverted dropout; the identity when !training or p == 0.
Tensor dropout(const Tensor& x, double p, Rng& rng, bool training);

// [N,C,H,W] -> [N,C].
Tensor gap(const Tensor& x);
// [N,T,D] -> [N,D].
Tensor token_mean(const Tensor& x);
Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
Tensor reshape(const Tensor& x, Shape shape);
// [B,M,N] -> [B,N,M].
Tensor transpose12(const Tensor& x);
// [N,C,H,W] -> [N,H*W,C].
Tensor map_to_tokens(const Tensor& x);
// [N,T,H*d] <-> [N*H,T,d].
Tensor split_heads(const Tensor& x, std::size_t heads);
Tensor merge_heads(const Tensor& x, std::size_t heads);
Tensor softmax_rows(const Tensor& x);
// g [N,C] broadcast over F [N,C,H,W].
Tensor scale_channels(const Tensor& g, const Tensor& f);

// sigmoid(mean over positions of A) applied per channel to F. A is
// [N,T,C] (tokens) or [N,C,H,W].
Tensor channel_gate(const Tensor& a, const Tensor& f);
// Scaled dot-product attention over already projected q [N,Tq,D], k, v [N,Tk,D],
// heads concatenated, no output projection.
Tensor attention_core(const Tensor& q, const Tensor& k, const Tensor& v, std::size_t heads);

// Mean over rows of -log softmax(logits)[label].
Tensor softmax_xent(const Tensor& logits, const std::vector<int>& labels);
// Mean of (pred - target)^2 over all values.
Tensor mse(const Tensor& pred, const std::vector<double>& target);
// x [N,A] -> [N] with x[n, index[n]].
Tensor pick(const Tensor& x, const std::vector<std::size_t>& index);

}  // namespace jamlab::fusion_net
