#include "jamlab/fusion_net/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

#include "jamlab/common/error.hpp"

namespace jamlab::fusion_net {
namespace {

using MatR = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapR = Eigen::Map<MatR>;
using CMapR = Eigen::Map<const MatR>;
using CVecMap = Eigen::Map<const Eigen::VectorXd>;

void check(bool ok, const char* op, const std::string& detail) {
  require(ok, ErrorKind::shape_mismatch, std::string(op) + ": " + detail);
}

Node& in(Node& self, std::size_t i) { return *self.inputs[i]; }

void accumulate(Node& target, const std::vector<double>& g) {
  auto& dst = target.ensure_grad();
  for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check(a.shape() == b.shape(), "add", shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.data()[i] + b.data()[i];
  return make_result(a.shape(), std::move(v), {a, b}, [](Node& self) {
    for (std::size_t k = 0; k < 2; ++k)
      if (in(self, k).requires_grad) accumulate(in(self, k), self.grad);
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check(a.shape() == b.shape(), "mul", shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  std::vector<double> v(a.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.data()[i] * b.data()[i];
  return make_result(a.shape(), std::move(v), {a, b}, [](Node& self) {
    Node& x = in(self, 0);
    Node& y = in(self, 1);
    if (x.requires_grad) {
      auto& g = x.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * y.value[i];
    }
    if (y.requires_grad) {
      auto& g = y.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * x.value[i];
    }
  });
}

Tensor scale(const Tensor& a, double s) {
  std::vector<double> v(a.data());
  for (double& e : v) e *= s;
  return make_result(a.shape(), std::move(v), {a}, [s](Node& self) {
    auto& g = in(self, 0).ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += s * self.grad[i];
  });
}

Tensor sum(const Tensor& a) {
  double total = 0.0;
  for (double e : a.data()) total += e;
  return make_result({1}, {total}, {a}, [](Node& self) {
    auto& g = in(self, 0).ensure_grad();
    for (double& e : g) e += self.grad[0];
  });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  check(a.rank() == 2 && b.rank() == 2 && a.dim(1) == b.dim(0), "matmul",
        shape_str(a.shape()) + " x " + shape_str(b.shape()));
  const auto m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> v(m * n);
  MapR(v.data(), m, n).noalias() = CMapR(a.data().data(), m, k) * CMapR(b.data().data(), k, n);
  return make_result({m, n}, std::move(v), {a, b}, [m, k, n](Node& self) {
    CMapR g(self.grad.data(), m, n);
    Node& x = in(self, 0);
    Node& y = in(self, 1);
    if (x.requires_grad) MapR(x.ensure_grad().data(), m, k).noalias() += g * CMapR(y.value.data(), k, n).transpose();
    if (y.requires_grad) MapR(y.ensure_grad().data(), k, n).noalias() += CMapR(x.value.data(), m, k).transpose() * g;
  });
}

Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b) {
  check(a.rank() == 3 && b.rank() == 3 && a.dim(0) == b.dim(0), "bmm",
        shape_str(a.shape()) + " x " + shape_str(b.shape()));
  const auto batch = a.dim(0), m = a.dim(1), k = a.dim(2);
  const auto n = transpose_b ? b.dim(1) : b.dim(2);
  check((transpose_b ? b.dim(2) : b.dim(1)) == k, "bmm", "inner dimensions differ");
  std::vector<double> v(batch * m * n);
  for (std::size_t i = 0; i < batch; ++i) {
    CMapR x(a.data().data() + i * m * k, m, k);
    MapR out(v.data() + i * m * n, m, n);
    if (transpose_b)
      out.noalias() = x * CMapR(b.data().data() + i * n * k, n, k).transpose();
    else
      out.noalias() = x * CMapR(b.data().data() + i * k * n, k, n);
  }
  return make_result({batch, m, n}, std::move(v), {a, b}, [batch, m, k, n, transpose_b](Node& self) {
    Node& x = in(self, 0);
    Node& y = in(self, 1);
    for (std::size_t i = 0; i < batch; ++i) {
      CMapR g(self.grad.data() + i * m * n, m, n);
      CMapR xv(x.value.data() + i * m * k, m, k);
      if (transpose_b) {
        CMapR yv(y.value.data() + i * n * k, n, k);
        if (x.requires_grad) MapR(x.ensure_grad().data() + i * m * k, m, k).noalias() += g * yv;
        if (y.requires_grad) MapR(y.ensure_grad().data() + i * n * k, n, k).noalias() += g.transpose() * xv;
      } else {
        CMapR yv(y.value.data() + i * k * n, k, n);
        if (x.requires_grad) MapR(x.ensure_grad().data() + i * m * k, m, k).noalias() += g * yv.transpose();
        if (y.requires_grad) MapR(y.ensure_grad().data() + i * k * n, k, n).noalias() += xv.transpose() * g;
      }
    }
  });
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  check(x.rank() >= 2 && w.rank() == 2 && b.rank() == 1, "linear", "needs x [...,in], w [out,in], b [out]");
  const auto in_dim = x.shape().back();
  const auto out_dim = w.dim(0);
  check(w.dim(1) == in_dim && b.dim(0) == out_dim, "linear",
        shape_str(x.shape()) + " with w " + shape_str(w.shape()) + " b " + shape_str(b.shape()));
  const auto rows = x.numel() / in_dim;
  std::vector<double> v(rows * out_dim);
  MapR out(v.data(), rows, out_dim);
  out.noalias() = CMapR(x.data().data(), rows, in_dim) * CMapR(w.data().data(), out_dim, in_dim).transpose();
  out.rowwise() += CVecMap(b.data().data(), out_dim).transpose();
  Shape shape = x.shape();
  shape.back() = out_dim;
  return make_result(std::move(shape), std::move(v), {x, w, b}, [rows, in_dim, out_dim](Node& self) {
    CMapR g(self.grad.data(), rows, out_dim);
    Node& xs = in(self, 0);
    Node& ws = in(self, 1);
    Node& bs = in(self, 2);
    if (xs.requires_grad)
      MapR(xs.ensure_grad().data(), rows, in_dim).noalias() += g * CMapR(ws.value.data(), out_dim, in_dim);
    if (ws.requires_grad)
      MapR(ws.ensure_grad().data(), out_dim, in_dim).noalias() += g.transpose() * CMapR(xs.value.data(), rows, in_dim);
    if (bs.requires_grad) {
      auto& gb = bs.ensure_grad();
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t o = 0; o < out_dim; ++o) gb[o] += self.grad[r * out_dim + o];
    }
  });
}

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, std::size_t stride, std::size_t pad) {
  check(x.rank() == 4 && w.rank() == 4 && b.rank() == 1, "conv2d", "needs x [N,C,H,W], w [F,C,kh,kw], b [F]");
  const auto n_batch = x.dim(0), c_in = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const auto f_out = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  check(w.dim(1) == c_in && b.dim(0) == f_out, "conv2d",
        shape_str(x.shape()) + " with w " + shape_str(w.shape()) + " b " + shape_str(b.shape()));
  check(stride > 0 && h + 2 * pad >= kh && wd + 2 * pad >= kw, "conv2d", "kernel larger than padded input");
  const auto ho = (h + 2 * pad - kh) / stride + 1;
  const auto wo = (wd + 2 * pad - kw) / stride + 1;
  const auto ck = c_in * kh * kw;
  const auto positions = ho * wo;
  const bool direct = kh == 1 && kw == 1 && stride == 1 && pad == 0;

  std::vector<double> cols(direct ? 0 : n_batch * ck * positions, 0.0);
  std::vector<double> v(n_batch * f_out * positions);
  CMapR wm(w.data().data(), f_out, ck);
  CVecMap bias(b.data().data(), f_out);
  for (std::size_t n = 0; n < n_batch; ++n) {
    const double* xn = x.data().data() + n * c_in * h * wd;
    const double* colp = xn;
    if (!direct) {
      double* cn = cols.data() + n * ck * positions;
      for (std::size_t c = 0; c < c_in; ++c)
        for (std::size_t i = 0; i < kh; ++i)
          for (std::size_t j = 0; j < kw; ++j) {
            double* row = cn + ((c * kh + i) * kw + j) * positions;
            for (std::size_t oh = 0; oh < ho; ++oh) {
              const auto ih = std::ptrdiff_t(oh * stride + i) - std::ptrdiff_t(pad);
              if (ih < 0 || ih >= std::ptrdiff_t(h)) continue;
              for (std::size_t ow = 0; ow < wo; ++ow) {
                const auto iw = std::ptrdiff_t(ow * stride + j) - std::ptrdiff_t(pad);
                if (iw >= 0 && iw < std::ptrdiff_t(wd)) row[oh * wo + ow] = xn[(c * h + std::size_t(ih)) * wd + std::size_t(iw)];
              }
            }
          }
      colp = cn;
    }
    MapR out(v.data() + n * f_out * positions, f_out, positions);
    out.noalias() = wm * CMapR(colp, ck, positions);
    out.colwise() += bias;
  }

  auto backward_fn = [=, cols = std::move(cols)](Node& self) {
    Node& xs = in(self, 0);
    Node& ws = in(self, 1);
    Node& bs = in(self, 2);
    CMapR wmat(ws.value.data(), f_out, ck);
    std::vector<double> dcols(xs.requires_grad && !direct ? ck * positions : 0);
    for (std::size_t n = 0; n < n_batch; ++n) {
      CMapR g(self.grad.data() + n * f_out * positions, f_out, positions);
      const double* colp = direct ? xs.value.data() + n * c_in * h * wd : cols.data() + n * ck * positions;
      if (ws.requires_grad) MapR(ws.ensure_grad().data(), f_out, ck).noalias() += g * CMapR(colp, ck, positions).transpose();
      if (bs.requires_grad) {
        auto& gb = bs.ensure_grad();
        for (std::size_t f = 0; f < f_out; ++f) {
          const double* row = self.grad.data() + (n * f_out + f) * positions;
          double acc = 0.0;
          for (std::size_t p = 0; p < positions; ++p) acc += row[p];
          gb[f] += acc;
        }
      }
      if (!xs.requires_grad) continue;
      double* dx = xs.ensure_grad().data() + n * c_in * h * wd;
      if (direct) {
        MapR(dx, ck, positions).noalias() += wmat.transpose() * g;
        continue;
      }
      MapR(dcols.data(), ck, positions).noalias() = wmat.transpose() * g;
      for (std::size_t c = 0; c < c_in; ++c)
        for (std::size_t i = 0; i < kh; ++i)
          for (std::size_t j = 0; j < kw; ++j) {
            const double* row = dcols.data() + ((c * kh + i) * kw + j) * positions;
            for (std::size_t oh = 0; oh < ho; ++oh) {
              const auto ih = std::ptrdiff_t(oh * stride + i) - std::ptrdiff_t(pad);
              if (ih < 0 || ih >= std::ptrdiff_t(h)) continue;
              for (std::size_t ow = 0; ow < wo; ++ow) {
                const auto iw = std::ptrdiff_t(ow * stride + j) - std::ptrdiff_t(pad);
                if (iw >= 0 && iw < std::ptrdiff_t(wd)) dx[(c * h + std::size_t(ih)) * wd + std::size_t(iw)] += row[oh * wo + ow];
              }
            }
          }
    }
  };
  return make_result({n_batch, f_out, ho, wo}, std::move(v), {x, w, b}, std::move(backward_fn));
}

Tensor maxpool2d(const Tensor& x, std::size_t kernel, std::size_t stride, std::size_t pad) {
  check(x.rank() == 4, "maxpool2d", "needs [N,C,H,W]");
  check(kernel > 0 && stride > 0 && pad < kernel, "maxpool2d", "invalid kernel/stride/pad");
  const auto planes = x.dim(0) * x.dim(1), h = x.dim(2), wd = x.dim(3);
  check(h + 2 * pad >= kernel && wd + 2 * pad >= kernel, "maxpool2d", "kernel larger than padded input");
  const auto ho = (h + 2 * pad - kernel) / stride + 1;
  const auto wo = (wd + 2 * pad - kernel) / stride + 1;
  std::vector<double> v(planes * ho * wo);
  std::vector<std::size_t> arg(v.size());
  for (std::size_t p = 0; p < planes; ++p) {
    const double* src = x.data().data() + p * h * wd;
    for (std::size_t oh = 0; oh < ho; ++oh)
      for (std::size_t ow = 0; ow < wo; ++ow) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_at = 0;
        for (std::size_t i = 0; i < kernel; ++i) {
          const auto ih = std::ptrdiff_t(oh * stride + i) - std::ptrdiff_t(pad);
          if (ih < 0 || ih >= std::ptrdiff_t(h)) continue;
          for (std::size_t j = 0; j < kernel; ++j) {
            const auto iw = std::ptrdiff_t(ow * stride + j) - std::ptrdiff_t(pad);
            if (iw < 0 || iw >= std::ptrdiff_t(wd)) continue;
            const std::size_t at = std::size_t(ih) * wd + std::size_t(iw);
            if (src[at] > best) {
              best = src[at];
              best_at = at;
            }
          }
        }
        const std::size_t o = (p * ho + oh) * wo + ow;
        v[o] = best;
        arg[o] = p * h * wd + best_at;
      }
  }
  return make_result({x.dim(0), x.dim(1), ho, wo}, std::move(v), {x}, [arg = std::move(arg)](Node& self) {
    auto& g = in(self, 0).ensure_grad();
    for (std::size_t o = 0; o < arg.size(); ++o) g[arg[o]] += self.grad[o];
  });
}

Tensor avgpool2d(const Tensor& x, std::size_t kernel) {
  check(x.rank() == 4 && kernel > 0 && x.dim(2) % kernel == 0 && x.dim(3) % kernel == 0, "avgpool2d",
        shape_str(x.shape()) + " not divisible by kernel " + std::to_string(kernel));
  const auto planes = x.dim(0) * x.dim(1), h = x.dim(2), wd = x.dim(3);
  const auto ho = h / kernel, wo = wd / kernel;
  const double w = 1.0 / double(kernel * kernel);
  std::vector<double> v(planes * ho * wo, 0.0);
  for (std::size_t p = 0; p < planes; ++p)
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < wd; ++j)
        v[(p * ho + i / kernel) * wo + j / kernel] += w * x.data()[(p * h + i) * wd + j];
  return make_result({x.dim(0), x.dim(1), ho, wo}, std::move(v), {x}, [=](Node& self) {
    auto& g = in(self, 0).ensure_grad();
    for (std::size_t p = 0; p < planes; ++p)
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < wd; ++j)
          g[(p * h + i) * wd + j] += w * self.grad[(p * ho + i / kernel) * wo + j / kernel];
  });
}

Tensor relu(const Tensor& x) {
  std::vector<double> v(x.data());
  for (double& e : v) e = e > 0.0 ? e : 0.0;
  return make_result(x.shape(), std::move(v), {x}, [](Node& self) {
    Node& xs = in(self, 0);
    auto& g = xs.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i)
      if (xs.value[i] > 0.0) g[i] += self.grad[i];
  });
}

Tensor sigmoid(const Tensor& x) {
  std::vector<double> v(x.data());
  for (double& e : v) e = e >= 0.0 ? 1.0 / (1.0 + std::exp(-e)) : std::exp(e) / (1.0 + std::exp(e));
  return make_result(x.shape(), std::move(v), {x}, [](Node& self) {
    auto& g = in(self, 0).ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * self.value[i] * (1.0 - self.value[i]);
  });
}

Tensor dropout(const Tensor& x, double p, Rng& rng, bool training) {
  require(p >= 0.0 && p < 1.0, ErrorKind::invalid_params, "dropout probability must lie in [0, 1)");
  if (!training || p == 0.0) return x;
  const double keep = 1.0 / (1.0 - p);
  std::bernoulli_distribution drop(p);
  std::vector<double> mask(x.numel());
  for (double& m : mask) m = drop(rng) ? 0.0 : keep;
  std::vector<double> v(x.numel());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = x.data()[i] * mask[i];
  return make_result(x.shape(), std::move(v), {x}, [mask = std::move(mask)](Node& self) {
    auto& g = in(self, 0).ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * mask[i];
  });
}

namespace {

// Mean over the middle axis of an [outer, count, inner] layout -> [outer, inner].
Tensor mean_middle(const Tensor& x, std::size_t outer, std::size_t count, std::size_t inner, Shape shape) {
  std::vector<double> v(outer * inner, 0.0);
  const double w = 1.0 / double(count);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t c = 0; c < count; ++c)
      for (std::size_t i = 0; i < inner; ++i) v[o * inner + i] += w * x.data()[(o * count + c) * inner + i];
  return make_result(std::move(shape), std::move(v), {x}, [outer, count, inner, w](Node& self) {
    auto& g = in(self, 0).ensure_grad();
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t c = 0; c < count; ++c)
        for (std::size_t i = 0; i < inner; ++i) g[(o * count + c) * inner + i] += w * self.grad[o * inner + i];
  });
}

}  // namespace

Tensor gap(const Tensor& x) {
  check(x.rank() == 4, "gap", "needs [N,C,H,W]");
  const auto rows = x.dim(0) * x.dim(1);
  return mean_middle(x, rows, x.dim(2) * x.dim(3), 1, {x.dim(0), x.dim(1)});
}

Tensor token_mean(const Tensor& x) {
  check(x.rank() == 3, "token_mean", "needs [N,T,D]");
  return mean_middle(x, x.dim(0), x.dim(1), x.dim(2), {x.dim(0), x.dim(2)});
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
  check(!parts.empty(), "concat", "no inputs");
  const Shape& first = parts[0].shape();
  check(axis < first.size(), "concat", "axis out of range");
  std::size_t outer = 1, inner = 1, total = 0;
  for (std::size_t i = 0; i < axis; ++i) outer *= first[i];
  for (std::size_t i = axis + 1; i < first.size(); ++i) inner *= first[i];
  std::vector<std::size_t> widths;
  for (const auto& t : parts) {
    check(t.rank() == first.size(), "concat", "rank mismatch");
    for (std::size_t i = 0; i < first.size(); ++i)
      check(i == axis || t.dim(i) == first[i], "concat", shape_str(t.shape()) + " vs " + shape_str(first));
    widths.push_back(t.dim(axis) * inner);
    total += t.dim(axis);
  }
  const std::size_t row = total * inner;
  std::vector<double> v(outer * row);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    for (std::size_t o = 0; o < outer; ++o)
      std::copy_n(parts[k].data().data() + o * widths[k], widths[k], v.data() + o * row + offset);
    offset += widths[k];
  }
  Shape shape = first;
  shape[axis] = total;
  return make_result(std::move(shape), std::move(v), parts, [outer, row, widths](Node& self) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < widths.size(); ++k) {
      Node& p = in(self, k);
      if (p.requires_grad) {
        auto& g = p.ensure_grad();
        for (std::size_t o = 0; o < outer; ++o)
          for (std::size_t i = 0; i < widths[k]; ++i) g[o * widths[k] + i] += self.grad[o * row + off + i];
      }
      off += widths[k];
    }
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  check(shape_numel(shape) == x.numel(), "reshape", shape_str(x.shape()) + " -> " + shape_str(shape));
  return make_result(std::move(shape), x.data(), {x}, [](Node& self) { accumulate(in(self, 0), self.grad); });
}

Tensor transpose12(const Tensor& x) {
  check(x.rank() == 3, "transpose12", "needs [B,M,N]");
  const auto batch = x.dim(0), m = x.dim(1), n = x.dim(2);
  std::vector<double> v(x.numel());
  for (std::size_t b = 0; b < batch; ++b)
    MapR(v.data() + b * m * n, n, m) = CMapR(x.data().data() + b * m * n, m, n).transpose();
  return make_result({batch, n, m}, std::move(v), {x}, [batch, m, n](Node& self) {
    auto& g = in(self, 0).ensure_grad();
    for (std::size_t b = 0; b < batch; ++b)
      MapR(g.data() + b * m * n, m, n) += CMapR(self.grad.data() + b * m * n, n, m).transpose();
  });
}

Tensor map_to_tokens(const Tensor& x) {
  check(x.rank() == 4, "map_to_tokens", "needs [N,C,H,W]");
  return transpose12(reshape(x, {x.dim(0), x.dim(1), x.dim(2) * x.dim(3)}));
}

namespace {

// [N,T,H,d] <-> [N,H,T,d] index permutation shared by split/merge.
std::vector<double> permute_heads(const std::vector<double>& src, std::size_t n, std::size_t t, std::size_t h,
                                  std::size_t d, bool to_heads) {
  std::vector<double> dst(src.size());
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t k = 0; k < h; ++k) {
        const std::size_t tok = ((a * t + i) * h + k) * d;
        const std::size_t head = ((a * h + k) * t + i) * d;
        if (to_heads)
          std::copy_n(src.data() + tok, d, dst.data() + head);
        else
          std::copy_n(src.data() + head, d, dst.data() + tok);
      }
  return dst;
}

}  // namespace

Tensor split_heads(const Tensor& x, std::size_t heads) {
  check(x.rank() == 3 && heads > 0 && x.dim(2) % heads == 0, "split_heads", "width not divisible by heads");
  const auto n = x.dim(0), t = x.dim(1), d = x.dim(2) / heads;
  return make_result({n * heads, t, d}, permute_heads(x.data(), n, t, heads, d, true), {x},
                     [n, t, heads, d](Node& self) {
                       accumulate(in(self, 0), permute_heads(self.grad, n, t, heads, d, false));
                     });
}

Tensor merge_heads(const Tensor& x, std::size_t heads) {
  check(x.rank() == 3 && heads > 0 && x.dim(0) % heads == 0, "merge_heads", "batch not divisible by heads");
  const auto n = x.dim(0) / heads, t = x.dim(1), d = x.dim(2);
  return make_result({n, t, heads * d}, permute_heads(x.data(), n, t, heads, d, false), {x},
                     [n, t, heads, d](Node& self) {
                       accumulate(in(self, 0), permute_heads(self.grad, n, t, heads, d, true));
                     });
}

Tensor softmax_rows(const Tensor& x) {
  check(x.rank() >= 1, "softmax_rows", "needs rank >= 1");
  const auto width = x.shape().back();
  const auto rows = x.numel() / width;
  std::vector<double> v(x.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* src = x.data().data() + r * width;
    double* dst = v.data() + r * width;
    const double peak = *std::max_element(src, src + width);
    double total = 0.0;
    for (std::size_t i = 0; i < width; ++i) total += dst[i] = std::exp(src[i] - peak);
    for (std::size_t i = 0; i < width; ++i) dst[i] /= total;
  }
  return make_result(x.shape(), std::move(v), {x}, [rows, width](Node& self) {
    auto& g = in(self, 0).ensure_grad();
    for (std::size_t r = 0; r < rows; ++r) {
      const double* y = self.value.data() + r * width;
      const double* gy = self.grad.data() + r * width;
      double dot = 0.0;
      for (std::size_t i = 0; i < width; ++i) dot += gy[i] * y[i];
      for (std::size_t i = 0; i < width; ++i) g[r * width + i] += y[i] * (gy[i] - dot);
    }
  });
}

Tensor scale_channels(const Tensor& g, const Tensor& f) {
  check(g.rank() == 2 && f.rank() == 4 && g.dim(0) == f.dim(0) && g.dim(1) == f.dim(1), "scale_channels",
        shape_str(g.shape()) + " vs " + shape_str(f.shape()));
  const auto planes = g.numel();
  const auto area = f.dim(2) * f.dim(3);
  std::vector<double> v(f.numel());
  for (std::size_t p = 0; p < planes; ++p)
    for (std::size_t i = 0; i < area; ++i) v[p * area + i] = g.data()[p] * f.data()[p * area + i];
  return make_result(f.shape(), std::move(v), {g, f}, [planes, area](Node& self) {
    Node& gs = in(self, 0);
    Node& fs = in(self, 1);
    for (std::size_t p = 0; p < planes; ++p) {
      double dg = 0.0;
      for (std::size_t i = 0; i < area; ++i) dg += self.grad[p * area + i] * fs.value[p * area + i];
      if (gs.requires_grad) gs.ensure_grad()[p] += dg;
      if (fs.requires_grad) {
        auto& df = fs.ensure_grad();
        for (std::size_t i = 0; i < area; ++i) df[p * area + i] += self.grad[p * area + i] * gs.value[p];
      }
    }
  });
}

Tensor channel_gate(const Tensor& a, const Tensor& f) {
  check(f.rank() == 4, "channel_gate", "F must be [N,C,H,W]");
  check(a.rank() == 3 || a.rank() == 4, "channel_gate", "A must be [N,T,C] or [N,C,H,W]");
  const Tensor pooled = a.rank() == 3 ? token_mean(a) : gap(a);
  return scale_channels(sigmoid(pooled), f);
}

Tensor attention_core(const Tensor& q, const Tensor& k, const Tensor& v, std::size_t heads) {
  check(q.rank() == 3 && k.rank() == 3 && v.shape() == k.shape() && q.dim(0) == k.dim(0) && q.dim(2) == k.dim(2),
        "attention", shape_str(q.shape()) + " / " + shape_str(k.shape()) + " / " + shape_str(v.shape()));
  check(heads > 0 && q.dim(2) % heads == 0, "attention", "model width not divisible by heads");
  const double inv = 1.0 / std::sqrt(double(q.dim(2) / heads));
  const Tensor scores = bmm(split_heads(scale(q, inv), heads), split_heads(k, heads), true);
  return merge_heads(bmm(softmax_rows(scores), split_heads(v, heads)), heads);
}

Tensor softmax_xent(const Tensor& logits, const std::vector<int>& labels) {
  check(logits.rank() == 2 && logits.dim(0) == labels.size() && !labels.empty(), "softmax_xent",
        "needs logits [N,C] and N labels");
  const auto n = logits.dim(0), c = logits.dim(1);
  std::vector<double> prob(n * c);
  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    require(labels[r] >= 0 && std::size_t(labels[r]) < c, ErrorKind::invalid_label,
            "label " + std::to_string(labels[r]) + " outside [0, " + std::to_string(c) + ")");
    const double* z = logits.data().data() + r * c;
    const double top = *std::max_element(z, z + c);
    double total = 0.0;
    for (std::size_t i = 0; i < c; ++i) total += std::exp(z[i] - top);
    const double log_total = std::log(total);
    for (std::size_t i = 0; i < c; ++i) prob[r * c + i] = std::exp(z[i] - top - log_total);
    loss -= z[std::size_t(labels[r])] - top - log_total;
  }
  loss /= double(n);
  return make_result({1}, {loss}, {logits}, [prob = std::move(prob), labels, n, c](Node& self) {
    auto& g = in(self, 0).ensure_grad();
    const double s = self.grad[0] / double(n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < c; ++i)
        g[r * c + i] += s * (prob[r * c + i] - (std::size_t(labels[r]) == i ? 1.0 : 0.0));
  });
}

Tensor mse(const Tensor& pred, const std::vector<double>& target) {
  check(pred.numel() == target.size() && !target.empty(), "mse", "prediction and target sizes differ");
  double loss = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) loss += (pred.data()[i] - target[i]) * (pred.data()[i] - target[i]);
  loss /= double(target.size());
  return make_result({1}, {loss}, {pred}, [target](Node& self) {
    Node& p = in(self, 0);
    auto& g = p.ensure_grad();
    const double s = 2.0 * self.grad[0] / double(target.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += s * (p.value[i] - target[i]);
  });
}

Tensor pick(const Tensor& x, const std::vector<std::size_t>& index) {
  check(x.rank() == 2 && x.dim(0) == index.size(), "pick", "needs [N,A] and N indices");
  const auto a = x.dim(1);
  std::vector<double> v(index.size());
  for (std::size_t r = 0; r < index.size(); ++r) {
    require(index[r] < a, ErrorKind::invalid_action, "pick index out of range");
    v[r] = x.data()[r * a + index[r]];
  }
  return make_result({index.size()}, std::move(v), {x}, [index, a](Node& self) {
    auto& g = in(self, 0).ensure_grad();
    for (std::size_t r = 0; r < index.size(); ++r) g[r * a + index[r]] += self.grad[r];
  });
}

}  // namespace jamlab::fusion_net
