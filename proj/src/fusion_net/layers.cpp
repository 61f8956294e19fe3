#include "jamlab/fusion_net/layers.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>

#include "jamlab/common/error.hpp"

namespace jamlab::fusion_net {

Tensor ParamSet::add(const std::string& name, Tensor t) {
  for (const auto& [n, _] : items_)
    require(n != name, ErrorKind::invalid_params, "duplicate parameter name " + name);
  t.node()->requires_grad = true;
  items_.emplace_back(name, t);
  return t;
}

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [_, t] : items_) n += t.numel();
  return n;
}

Tensor ParamSet::find(const std::string& name) const {
  for (const auto& [n, t] : items_)
    if (n == name) return t;
  throw Error(ErrorKind::invalid_params, "no parameter named " + name);
}

void ParamSet::zero_grad() {
  for (auto& [_, t] : items_) t.zero_grad();
}

void ParamSet::copy_from(const ParamSet& other) {
  require(other.items_.size() == items_.size(), ErrorKind::shape_mismatch, "parameter sets differ in size");
  for (std::size_t i = 0; i < items_.size(); ++i) {
    require(items_[i].first == other.items_[i].first && items_[i].second.shape() == other.items_[i].second.shape(),
            ErrorKind::shape_mismatch, "parameter mismatch at " + items_[i].first);
    items_[i].second.data() = other.items_[i].second.data();
  }
}

Tensor init_tensor(Shape shape, std::size_t fan_in, std::size_t fan_out, Init init, Rng& rng) {
  Tensor t = Tensor::zeros(std::move(shape));
  if (init == Init::zero) return t;
  const double bound = init == Init::he ? std::sqrt(6.0 / double(fan_in)) : std::sqrt(6.0 / double(fan_in + fan_out));
  for (double& v : t.data()) v = uniform(rng, -bound, bound);
  return t;
}

Linear::Linear(ParamSet& ps, const std::string& name, std::size_t in, std::size_t out, Rng& rng, Init init) {
  w = ps.add(name + ".w", init_tensor({out, in}, in, out, init, rng));
  b = ps.add(name + ".b", Tensor::zeros({out}));
}

Conv2d::Conv2d(ParamSet& ps, const std::string& name, std::size_t in, std::size_t out, std::size_t kernel,
               std::size_t stride_, std::size_t pad_, Rng& rng)
    : stride(stride_), pad(pad_) {
  const std::size_t fan_in = in * kernel * kernel;
  w = ps.add(name + ".w", init_tensor({out, in, kernel, kernel}, fan_in, out * kernel * kernel, Init::he, rng));
  b = ps.add(name + ".b", Tensor::zeros({out}));
}

MultiHeadAttention::MultiHeadAttention(ParamSet& ps, const std::string& name, std::size_t width, std::size_t heads_,
                                       Rng& rng)
    : q(ps, name + ".q", width, width, rng, Init::glorot),
      k(ps, name + ".k", width, width, rng, Init::glorot),
      v(ps, name + ".v", width, width, rng, Init::glorot),
      o(ps, name + ".o", width, width, rng, Init::glorot),
      heads(heads_) {
  require(heads > 0 && width % heads == 0, ErrorKind::invalid_params, "attention width not divisible by heads");
}

Tensor MultiHeadAttention::operator()(const Tensor& query_tokens, const Tensor& kv_tokens) const {
  return o(attention_core(q(query_tokens), k(kv_tokens), v(kv_tokens), heads));
}

Adam::Adam(ParamSet& params, AdamConfig cfg) : params_(params), cfg_(cfg) {
  for (const auto& [_, t] : params_.items()) {
    m_.emplace_back(t.numel(), 0.0);
    v_.emplace_back(t.numel(), 0.0);
  }
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(cfg_.beta1, double(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, double(t_));
  const auto& items = params_.items();
  for (std::size_t p = 0; p < items.size(); ++p) {
    Tensor t = items[p].second;
    if (t.grad().empty()) continue;
    auto& x = t.data();
    const auto& g = t.grad();
    auto& m = m_[p];
    auto& v = v_[p];
    for (std::size_t i = 0; i < x.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      x[i] -= cfg_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.eps);
    }
    t.zero_grad();
  }
}

namespace {

constexpr std::uint32_t kCheckpointVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = char((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

bool get_u32(std::istream& in, std::uint32_t& v) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
  v = std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
  return true;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ParamSet& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(bool(out), ErrorKind::io, "cannot write checkpoint " + path.string());
  out.write("FNET", 4);
  put_u32(out, kCheckpointVersion);
  for (const auto& [name, t] : params.items()) {
    put_u32(out, std::uint32_t(name.size()));
    out.write(name.data(), std::streamsize(name.size()));
    put_u32(out, std::uint32_t(t.rank()));
    for (auto d : t.shape()) put_u32(out, std::uint32_t(d));
    for (double v : t.data()) {
      std::uint32_t bits;
      const float f = float(v);
      std::memcpy(&bits, &f, 4);
      put_u32(out, bits);
    }
  }
  require(bool(out), ErrorKind::io, "checkpoint write failed for " + path.string());
}

void load_checkpoint(const std::filesystem::path& path, ParamSet& params) {
  std::ifstream in(path, std::ios::binary);
  require(bool(in), ErrorKind::checkpoint_load, "cannot open checkpoint " + path.string());
  char magic[4];
  std::uint32_t version = 0;
  require(in.read(magic, 4) && std::memcmp(magic, "FNET", 4) == 0 && get_u32(in, version),
          ErrorKind::checkpoint_load, path.string() + " is not an FNET checkpoint");
  require(version == kCheckpointVersion, ErrorKind::checkpoint_load, "unsupported checkpoint version");

  std::map<std::string, std::pair<Shape, std::vector<double>>> records;
  std::uint32_t name_len;
  while (get_u32(in, name_len)) {
    require(name_len < 4096, ErrorKind::checkpoint_load, "corrupt checkpoint record");
    std::string name(name_len, '\0');
    std::uint32_t rank = 0;
    require(in.read(name.data(), name_len) && get_u32(in, rank) && rank <= 8, ErrorKind::checkpoint_load,
            "truncated checkpoint record");
    Shape shape(rank);
    for (auto& d : shape) {
      std::uint32_t v;
      require(get_u32(in, v), ErrorKind::checkpoint_load, "truncated checkpoint shape");
      d = v;
    }
    std::vector<double> data(shape_numel(shape));
    for (double& v : data) {
      std::uint32_t bits;
      require(get_u32(in, bits), ErrorKind::checkpoint_load, "truncated checkpoint data for " + name);
      float f;
      std::memcpy(&f, &bits, 4);
      v = f;
    }
    records[name] = {std::move(shape), std::move(data)};
  }
  for (const auto& [name, t] : params.items()) {
    auto it = records.find(name);
    require(it != records.end(), ErrorKind::checkpoint_load, "checkpoint lacks parameter " + name);
    require(it->second.first == t.shape(), ErrorKind::checkpoint_load,
            "shape mismatch for " + name + ": " + shape_str(it->second.first) + " vs " + shape_str(t.shape()));
  }
  for (auto [name, t] : params.items()) t.data() = std::move(records[name].second);
}

}  // namespace jamlab::fusion_net
