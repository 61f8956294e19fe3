#include <doctest.h>

#include <cmath>
#include <map>
#include <memory>

#include "jamlab/common/error.hpp"
#include "jamlab/q_forge/agent.hpp"
#include "../support/toy_mdp.hpp"

using namespace jamlab;
using namespace jamlab::q_forge;
using testing::ToyMdp;

namespace {

EnvFactory toy_factory() {
  return [] { return std::make_unique<ToyMdp>(); };
}

ew_arena::EnvConfig aj_config() {
  ew_arena::EnvConfig cfg;
  cfg.strategy = ew_arena::Strategy::fixed;
  cfg.initial_type = ew_arena::JammerType::AJ;
  return cfg;
}

// One state, two actions, random reward per step; records the last reward
// seen for each action.
class CoinEnv final : public Environment {
 public:
  explicit CoinEnv(std::map<std::size_t, double>* last) : last_(last) {}
  std::size_t state_dim() const override { return 1; }
  std::size_t action_count() const override { return 2; }
  std::size_t discrete_state_count() const override { return 1; }
  void reset(std::uint64_t seed) override {
    rng_.seed(seed);
    t_ = 0;
  }
  std::vector<double> observation() const override { return {0.0}; }
  std::size_t discrete_state() const override { return 0; }
  EnvStep step(std::size_t a) override {
    const double r = uniform(rng_, -5.0, 5.0);
    (*last_)[a] = r;
    return {r, ++t_ >= 4};
  }

 private:
  std::map<std::size_t, double>* last_;
  Rng rng_;
  std::size_t t_ = 0;
};

}  // namespace

TEST_CASE("ArenaEnv adapter") {
  ArenaEnv env(aj_config());
  CHECK_THROWS_AS(env.observation(), Error);
  env.reset(4);
  CHECK(env.state_dim() == 8);
  CHECK(env.action_count() == 30);
  CHECK(env.discrete_state_count() == 300);
  const auto ref = ew_arena::env_step(env.config(), env.state(), 12);
  const auto out = env.step(12);
  CHECK(out.reward == ref.reward);
  CHECK(env.observation() == std::vector<double>(ref.next.obs.v.begin(), ref.next.obs.v.end()));
  CHECK(env.last_info().action_index == 12);
}

TEST_CASE("DQN on the toy MDP matches value iteration") {
  AgentConfig cfg;
  cfg.gamma = 0.9;
  cfg.batch_size = 32;
  cfg.buffer_capacity = 2000;
  cfg.target_sync_steps = 50;
  cfg.hidden = {32, 32};
  cfg.epsilon = {1.0, 0.3, 200};
  const auto res = train_dqn(toy_factory(), cfg, 2500, 7);
  const auto oracle = testing::toy_value_iteration(0.9);
  CHECK(oracle[0][0] == doctest::Approx(8.1));
  CHECK(oracle[2][1] == doctest::Approx(6.29));
  double worst = 0.0;
  for (std::size_t s = 0; s < 3; ++s) {
    std::vector<double> x(3, 0.0);
    x[s] = 1.0;
    const auto q = res.policy.q_values(x);
    for (std::size_t a = 0; a < 2; ++a) worst = std::max(worst, std::abs(q[a] - oracle[s][a]));
  }
  INFO("worst |Q - Q*| = " << worst);
  CHECK(worst < 1e-2);
}

TEST_CASE("SARSA on the toy MDP matches the on-policy oracle") {
  AgentConfig cfg;
  cfg.gamma = 0.5;
  cfg.epsilon = {0.3, 0.3, 0};
  cfg.sarsa_alpha = 1.0;
  cfg.sarsa_alpha_decay = 0.05;
  const auto res = train_sarsa(toy_factory(), cfg, 1000000, 3);
  const auto oracle = testing::toy_sarsa_oracle(0.5, 0.3);
  double worst = 0.0;
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t a = 0; a < 2; ++a) worst = std::max(worst, std::abs(res.table.at(s, a) - oracle[s][a]));
  INFO("worst |Q - Q_pi| = " << worst);
  CHECK(worst < 1e-2);
}

TEST_CASE("SARSA with gamma 0 and alpha 1 stores the last reward") {
  std::map<std::size_t, double> last;
  AgentConfig cfg;
  cfg.gamma = 0.0;
  cfg.sarsa_alpha = 1.0;
  const auto res = train_sarsa([&] { return std::make_unique<CoinEnv>(&last); }, cfg, 40, 1);
  REQUIRE(last.size() == 2);
  for (const auto& [a, r] : last) CHECK(res.table.at(0, a) == r);
}

TEST_CASE("injected optimal table earns the maximum every episode") {
  const auto env_cfg = aj_config();
  const auto factory = arena_factory(env_cfg);
  QTable table(ew_arena::discrete_state_count(env_cfg), 30);
  const std::size_t n = env_cfg.grid.n_channels;
  for (std::size_t s = 0; s < table.states(); ++s) {
    const std::size_t jam = (s / n) % n;
    for (std::size_t a = 0; a < 30; ++a) {
      const std::size_t k = a % n;
      table.at(s, a) = (k + 3 <= jam || jam + 3 <= k) ? 1.0 : 0.0;
    }
  }
  const auto trace = run_policy(factory, greedy_policy(table), 20, 5);
  for (double r : trace.total_reward) CHECK(r == env_cfg.max_episode_reward());

  AgentConfig cfg;
  cfg.epsilon = {0.0, 0.0, 0};
  const auto res = train_sarsa(factory, cfg, 20, 5, &table);
  for (double r : res.trace.total_reward) CHECK(r == 960.0);
}

TEST_CASE("trainers are deterministic and count steps across episodes") {
  const auto factory = arena_factory(aj_config());
  AgentConfig cfg;
  cfg.epsilon.decay_episodes = 10;
  cfg.target_sync_steps = 100;
  const auto a = train_dqn(factory, cfg, 12, 42);
  const auto b = train_dqn(factory, cfg, 12, 42);
  CHECK(a.trace.total_reward == b.trace.total_reward);
  CHECK(a.trace.loss_mean == b.trace.loss_mean);
  CHECK(a.env_steps == 12 * 32);
  CHECK(a.syncs == (12 * 32) / 100);
  CHECK(a.trace.epsilon[0] == 1.0);
  CHECK(a.trace.epsilon[11] == 0.05);

  const auto s1 = train_sarsa(factory, cfg, 30, 42);
  const auto s2 = train_sarsa(factory, cfg, 30, 42);
  CHECK(s1.trace.total_reward == s2.trace.total_reward);
  const auto s3 = train_sarsa(factory, cfg, 30, 43);
  CHECK(s1.trace.total_reward != s3.trace.total_reward);
}

TEST_CASE("target network changes only at sync steps") {
  ToyMdp env;
  AgentConfig cfg;
  cfg.batch_size = 4;
  cfg.target_sync_steps = 5;
  QNetwork online(3, 2, {8}, 1), target(3, 2, {8}, 1);
  fusion_net::Adam opt(online.params(), {1e-2});
  ReplayBuffer buf(50);
  Rng rng(2);
  env.reset(0);
  const std::vector<double> probe{0.0, 1.0, 0.0};
  auto prev = target.q_values(probe);
  for (std::size_t step = 1; step <= 23; ++step) {
    auto s = env.observation();
    const auto a = uniform_index(rng, 2);
    const auto out = env.step(a);
    buf.push({s, a, out.reward, env.observation(), out.done});
    if (out.done) env.reset(0);
    if (buf.size() >= cfg.batch_size) train_step(online, target, buf.sample(cfg.batch_size, rng), cfg, opt);
    const bool synced = sync_target(online, target, step, cfg);
    const auto now = target.q_values(probe);
    if (!synced) CHECK(now == prev);
    if (synced) CHECK(now == online.q_values(probe));
    prev = now;
  }
}
