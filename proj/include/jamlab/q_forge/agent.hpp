#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "jamlab/fusion_net/layers.hpp"
#include "jamlab/q_forge/environment.hpp"
#include "jamlab/q_forge/replay.hpp"

namespace jamlab::q_forge {

// Linear decay from start to end over decay_episodes, then flat.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  std::size_t decay_episodes = 300;
  double at(std::size_t episode) const;
};

struct AgentConfig {
  double gamma = 0.9;
  double lr = 1e-3;
  EpsilonSchedule epsilon;
  std::size_t batch_size = 64;
  std::size_t target_sync_steps = 100;
  std::size_t buffer_capacity = 10000;
  std::vector<std::size_t> hidden{64, 64};
  // SARSA step size alpha / (1 + alpha_decay * visits(s, a)).
  double sarsa_alpha = 0.1;
  double sarsa_alpha_decay = 0.0;

  void validate() const;
};

// MLP with relu hidden layers and one linear output per action.
class QNetwork {
 public:
  QNetwork(std::size_t state_dim, std::size_t actions, const std::vector<std::size_t>& hidden, std::uint64_t seed);
  QNetwork(const QNetwork&) = delete;
  QNetwork& operator=(const QNetwork&) = delete;
  QNetwork(QNetwork&&) = default;
  QNetwork& operator=(QNetwork&&) = default;

  // [B, state_dim] -> [B, actions].
  fusion_net::Tensor forward(const fusion_net::Tensor& states) const;
  std::vector<double> q_values(std::span<const double> s) const;

  fusion_net::ParamSet& params() { return *params_; }
  const fusion_net::ParamSet& params() const { return *params_; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_count() const { return actions_; }

 private:
  std::size_t state_dim_, actions_;
  std::unique_ptr<fusion_net::ParamSet> params_;
  std::vector<fusion_net::Linear> layers_;
};

// Greedy with probability 1 - epsilon (ties to the lowest index), else uniform.
std::size_t select_action(std::span<const double> q, double epsilon, Rng& rng);

// r + gamma max_a q_next[a]; the bootstrap is dropped when done.
double td_target(double r, std::span<const double> q_next, bool done, double gamma);

// One optimiser step on MSE(y, Q_online(s, a)); returns the loss before the step.
double train_step(QNetwork& online, const QNetwork& target, const std::vector<const Transition*>& batch,
                  const AgentConfig& cfg, fusion_net::Adam& opt);

// Copies online into target when step is a positive multiple of the sync period.
bool sync_target(const QNetwork& online, QNetwork& target, std::size_t step, const AgentConfig& cfg);

struct DqnResult {
  QNetwork policy;
  metric_bench::RewardTrace trace;
  std::size_t env_steps = 0;
  std::size_t syncs = 0;
};

using EpisodeCallback = std::function<void(std::size_t episode, double total_reward)>;

DqnResult train_dqn(const EnvFactory& factory, const AgentConfig& cfg, std::size_t episodes, std::uint64_t seed,
                    const EpisodeCallback& on_episode = {});

Policy greedy_policy(const QNetwork& net);

class QTable {
 public:
  QTable(std::size_t states, std::size_t actions);
  double& at(std::size_t s, std::size_t a) { return q_[s * actions_ + a]; }
  double at(std::size_t s, std::size_t a) const { return q_[s * actions_ + a]; }
  std::span<const double> row(std::size_t s) const { return {q_.data() + s * actions_, actions_}; }
  std::size_t states() const { return states_; }
  std::size_t actions() const { return actions_; }

 private:
  std::size_t states_, actions_;
  std::vector<double> q_;
};

struct SarsaResult {
  QTable table;
  metric_bench::RewardTrace trace;
};

// On-policy tabular SARSA over Environment::discrete_state(). The table
// starts at zero unless `init` is given.
SarsaResult train_sarsa(const EnvFactory& factory, const AgentConfig& cfg, std::size_t episodes, std::uint64_t seed,
                        const QTable* init = nullptr, const EpisodeCallback& on_episode = {});

Policy greedy_policy(const QTable& table);

}  // namespace jamlab::q_forge
