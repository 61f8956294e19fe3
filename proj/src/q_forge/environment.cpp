#include "jamlab/q_forge/environment.hpp"

#include "jamlab/common/error.hpp"

namespace jamlab::q_forge {

ArenaEnv::ArenaEnv(ew_arena::EnvConfig cfg) : cfg_(std::move(cfg)), actions_(cfg_.actions().size()) {
  cfg_.validate();
}

void ArenaEnv::reset(std::uint64_t seed) {
  state_ = ew_arena::env_reset(cfg_, seed);
  info_ = {};
  ready_ = true;
}

std::vector<double> ArenaEnv::observation() const {
  require(ready_, ErrorKind::invalid_action, "environment used before reset");
  return {state_.obs.v.begin(), state_.obs.v.end()};
}

std::size_t ArenaEnv::discrete_state() const {
  require(ready_, ErrorKind::invalid_action, "environment used before reset");
  return ew_arena::discrete_state(state_.obs, cfg_);
}

EnvStep ArenaEnv::step(std::size_t action) {
  require(ready_, ErrorKind::invalid_action, "environment used before reset");
  auto r = ew_arena::env_step(cfg_, state_, action);
  state_ = std::move(r.next);
  info_ = r.info;
  return {r.reward, r.done};
}

EnvFactory arena_factory(const ew_arena::EnvConfig& cfg) {
  cfg.validate();
  return [cfg] { return std::make_unique<ArenaEnv>(cfg); };
}

std::uint64_t episode_seed(std::uint64_t seed, std::size_t episode) {
  return derive_seed(derive_seed(seed, 0xE9150DEULL), episode);
}

metric_bench::RewardTrace run_policy(const EnvFactory& factory, const Policy& policy, std::size_t episodes,
                                     std::uint64_t seed, const StepHook& hook) {
  auto env = factory();
  metric_bench::RewardTrace trace;
  for (std::size_t e = 0; e < episodes; ++e) {
    env->reset(episode_seed(seed, e));
    double total = 0.0;
    for (std::size_t t = 0;; ++t) {
      const std::size_t a = policy(*env);
      const EnvStep out = env->step(a);
      total += out.reward;
      if (hook) hook(e, t, *env, a, out);
      if (out.done) break;
    }
    trace.push(total, 0.0, 0.0);
  }
  return trace;
}

}  // namespace jamlab::q_forge
