#include <memory>

#include "gradcheck.hpp"
#include "jamlab/fusion_net/ops.hpp"
#include "jamlab/q_forge/agent.hpp"

namespace jamlab::testing {

using namespace fusion_net;

namespace {

GradProblem q_problem(Rng& rng, bool td_loss) {
  auto net = std::make_shared<q_forge::QNetwork>(5, 4, std::vector<std::size_t>{7, 6}, rng());
  std::vector<Tensor> inputs;
  for (const auto& [name, t] : net->params().items()) {
    t.node()->value = rand_leaf(t.shape(), rng, 0.8).data();
    inputs.push_back(t);
  }
  Tensor s = rand_leaf({3, 5}, rng);
  inputs.push_back(s);
  if (!td_loss) return {inputs, [net, s] { return net->forward(s); }};
  const std::vector<std::size_t> actions{2, 0, 3};
  const std::vector<double> y{0.7, -1.3, 2.1};
  return {inputs, [net, s, actions, y] { return mse(pick(net->forward(s), actions), y); }};
}

}  // namespace

std::vector<GradCase> q_forge_grad_cases() {
  return {{"q_forward", [](Rng& rng) { return q_problem(rng, false); }},
          {"td_loss", [](Rng& rng) { return q_problem(rng, true); }}};
}

}  // namespace jamlab::testing
