#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jamlab/fusion_net/ops.hpp"

namespace jamlab::testing {

using namespace fusion_net;

Tensor rand_leaf(Shape shape, Rng& rng, double scale) {
  Tensor t = Tensor::zeros(std::move(shape), true);
  for (double& v : t.data()) v = scale * (uniform(rng, 0.05, 1.0) * (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0));
  return t;
}

Tensor distinct_leaf(Shape shape, Rng& rng) {
  Tensor t = Tensor::zeros(std::move(shape), true);
  std::vector<double> v(t.numel());
  std::iota(v.begin(), v.end(), 0.0);
  std::shuffle(v.begin(), v.end(), rng);
  for (std::size_t i = 0; i < v.size(); ++i) t.data()[i] = 0.01 * v[i] - 0.005 * double(v.size());
  return t;
}

GradReport run_grad_case(const GradCase& c, std::uint64_t seed, std::size_t samples, double eps, double tol) {
  Rng rng(seed);
  GradProblem prob = c.make(rng);
  GradReport report;
  report.name = c.name;

  Tensor probe_out;
  {
    NoGradGuard guard;
    probe_out = prob.f();
  }
  std::vector<double> weights(probe_out.numel());
  for (double& w : weights) w = uniform(rng, -1.0, 1.0);
  const Tensor w_t = Tensor::from(probe_out.shape(), weights);
  auto objective = [&] { return sum(mul(prob.f(), w_t)); };

  for (auto& t : prob.inputs) t.zero_grad();
  backward(objective());

  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t k = 0; k < prob.inputs.size(); ++k)
    for (std::size_t i = 0; i < prob.inputs[k].numel(); ++i) coords.emplace_back(k, i);
  std::shuffle(coords.begin(), coords.end(), rng);
  while (coords.size() < samples && !coords.empty()) coords.push_back(coords[coords.size() % coords.size()]);
  coords.resize(std::min(coords.size(), samples));

  NoGradGuard guard;
  for (const auto& [k, i] : coords) {
    Tensor& t = prob.inputs[k];
    const double analytic = t.grad().empty() ? 0.0 : t.grad()[i];
    const double saved = t.data()[i];
    t.data()[i] = saved + eps;
    const double up = objective().item();
    t.data()[i] = saved - eps;
    const double down = objective().item();
    t.data()[i] = saved;
    const double numeric = (up - down) / (2.0 * eps);
    const double rel = std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    report.worst_rel = std::max(report.worst_rel, rel);
    ++report.sampled;
    if (rel < tol) ++report.passed;
  }
  return report;
}

}  // namespace jamlab::testing
