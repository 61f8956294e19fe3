#include <algorithm>
#include <cmath>

#include "jamlab/common/error.hpp"
#include "jamlab/fusion_net/ops.hpp"
#include "jamlab/q_forge/agent.hpp"

namespace jamlab::q_forge {

using namespace fusion_net;

double EpsilonSchedule::at(std::size_t episode) const {
  if (decay_episodes == 0 || episode >= decay_episodes) return end;
  return start + (end - start) * double(episode) / double(decay_episodes);
}

void AgentConfig::validate() const {
  require(gamma >= 0.0 && gamma < 1.0, ErrorKind::invalid_config, "gamma must lie in [0, 1)");
  require(lr > 0.0, ErrorKind::invalid_config, "learning rate must be positive");
  for (double e : {epsilon.start, epsilon.end})
    require(e >= 0.0 && e <= 1.0, ErrorKind::invalid_config, "epsilon must lie in [0, 1]");
  require(batch_size >= 1 && batch_size <= buffer_capacity, ErrorKind::invalid_config,
          "batch size must be in [1, buffer capacity]");
  require(target_sync_steps >= 1, ErrorKind::invalid_config, "target sync period must be positive");
  for (auto h : hidden) require(h >= 1, ErrorKind::invalid_config, "hidden widths must be positive");
  require(sarsa_alpha > 0.0 && sarsa_alpha <= 1.0 && sarsa_alpha_decay >= 0.0, ErrorKind::invalid_config,
          "SARSA step size must lie in (0, 1] with nonnegative decay");
}

QNetwork::QNetwork(std::size_t state_dim, std::size_t actions, const std::vector<std::size_t>& hidden,
                   std::uint64_t seed)
    : state_dim_(state_dim), actions_(actions), params_(std::make_unique<ParamSet>()) {
  require(state_dim > 0 && actions > 0, ErrorKind::invalid_config, "Q-network needs states and actions");
  Rng rng(seed);
  std::size_t in = state_dim;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    layers_.emplace_back(*params_, "q.fc" + std::to_string(i), in, hidden[i], rng, Init::he);
    in = hidden[i];
  }
  layers_.emplace_back(*params_, "q.out", in, actions, rng, Init::glorot);
}

Tensor QNetwork::forward(const Tensor& states) const {
  require(states.rank() == 2 && states.dim(1) == state_dim_, ErrorKind::shape_mismatch,
          "Q-network expects [B, " + std::to_string(state_dim_) + "], got " + shape_str(states.shape()));
  Tensor h = states;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) h = relu(layers_[i](h));
  return layers_.back()(h);
}

std::vector<double> QNetwork::q_values(std::span<const double> s) const {
  NoGradGuard guard;
  return forward(Tensor::from({1, s.size()}, {s.begin(), s.end()})).data();
}

std::size_t select_action(std::span<const double> q, double epsilon, Rng& rng) {
  require(!q.empty(), ErrorKind::invalid_action, "no actions to select from");
  require(epsilon >= 0.0 && epsilon <= 1.0, ErrorKind::invalid_params, "epsilon must lie in [0, 1]");
  if (epsilon > 0.0 && uniform(rng, 0.0, 1.0) < epsilon) return uniform_index(rng, q.size());
  return std::size_t(std::max_element(q.begin(), q.end()) - q.begin());
}

double td_target(double r, std::span<const double> q_next, bool done, double gamma) {
  if (done) return r;
  require(!q_next.empty(), ErrorKind::invalid_params, "bootstrap needs next-state values");
  return r + gamma * *std::max_element(q_next.begin(), q_next.end());
}

namespace {

Tensor stack_states(const std::vector<const Transition*>& batch, bool next, std::size_t dim) {
  std::vector<double> flat;
  flat.reserve(batch.size() * dim);
  for (const auto* t : batch) {
    const auto& s = next ? t->s_next : t->s;
    require(s.size() == dim, ErrorKind::shape_mismatch, "transition state has the wrong length");
    flat.insert(flat.end(), s.begin(), s.end());
  }
  return Tensor::from({batch.size(), dim}, std::move(flat));
}

}  // namespace

double train_step(QNetwork& online, const QNetwork& target, const std::vector<const Transition*>& batch,
                  const AgentConfig& cfg, Adam& opt) {
  require(!batch.empty(), ErrorKind::empty_batch, "train_step on an empty batch");
  const std::size_t n = batch.size(), na = online.action_count();
  std::vector<double> y(n);
  {
    NoGradGuard guard;
    const Tensor q_next = target.forward(stack_states(batch, true, target.state_dim()));
    for (std::size_t i = 0; i < n; ++i)
      y[i] = td_target(batch[i]->r, {q_next.data().data() + i * na, na}, batch[i]->done, cfg.gamma);
  }
  std::vector<std::size_t> actions(n);
  for (std::size_t i = 0; i < n; ++i) {
    require(batch[i]->a < na, ErrorKind::invalid_action, "transition action out of range");
    actions[i] = batch[i]->a;
  }
  Tensor loss = mse(pick(online.forward(stack_states(batch, false, online.state_dim())), actions), y);
  const double value = loss.item();
  require(std::isfinite(value), ErrorKind::numeric, "non-finite TD loss");
  backward(loss);
  opt.step();
  return value;
}

bool sync_target(const QNetwork& online, QNetwork& target, std::size_t step, const AgentConfig& cfg) {
  if (step == 0 || step % cfg.target_sync_steps != 0) return false;
  target.params().copy_from(online.params());
  return true;
}

DqnResult train_dqn(const EnvFactory& factory, const AgentConfig& cfg, std::size_t episodes, std::uint64_t seed,
                    const EpisodeCallback& on_episode) {
  cfg.validate();
  auto env = factory();
  const std::uint64_t net_seed = derive_seed(seed, 0x0A11CEULL);
  DqnResult out{QNetwork(env->state_dim(), env->action_count(), cfg.hidden, net_seed), {}, 0, 0};
  QNetwork& online = out.policy;
  QNetwork target(env->state_dim(), env->action_count(), cfg.hidden, net_seed);
  Adam opt(online.params(), {cfg.lr});
  ReplayBuffer buffer(cfg.buffer_capacity);
  Rng rng(derive_seed(seed, 0xAC7ULL));

  for (std::size_t e = 0; e < episodes; ++e) {
    const double eps = cfg.epsilon.at(e);
    env->reset(episode_seed(seed, e));
    std::vector<double> s = env->observation();
    double total = 0.0, loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (;;) {
      const std::size_t a = select_action(online.q_values(s), eps, rng);
      const EnvStep step = env->step(a);
      std::vector<double> s_next = env->observation();
      total += step.reward;
      buffer.push({s, a, step.reward, s_next, step.done});
      if (buffer.size() >= cfg.batch_size) {
        loss_sum += train_step(online, target, buffer.sample(cfg.batch_size, rng), cfg, opt);
        ++loss_count;
      }
      ++out.env_steps;
      if (sync_target(online, target, out.env_steps, cfg)) ++out.syncs;
      s = std::move(s_next);
      if (step.done) break;
    }
    out.trace.push(total, eps, loss_count ? loss_sum / double(loss_count) : 0.0);
    if (on_episode) on_episode(e, total);
  }
  return out;
}

Policy greedy_policy(const QNetwork& net) {
  return [&net](const Environment& env) {
    const auto q = net.q_values(env.observation());
    return std::size_t(std::max_element(q.begin(), q.end()) - q.begin());
  };
}

}  // namespace jamlab::q_forge
