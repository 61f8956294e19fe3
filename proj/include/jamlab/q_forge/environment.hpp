#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "jamlab/ew_arena/arena.hpp"
#include "jamlab/metric_bench/report.hpp"

namespace jamlab::q_forge {

struct EnvStep {
  double reward = 0.0;
  bool done = false;
};

class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::size_t state_dim() const = 0;
  virtual std::size_t action_count() const = 0;
  virtual std::size_t discrete_state_count() const = 0;
  virtual void reset(std::uint64_t seed) = 0;
  virtual std::vector<double> observation() const = 0;
  virtual std::size_t discrete_state() const = 0;
  virtual EnvStep step(std::size_t action) = 0;
};

using EnvFactory = std::function<std::unique_ptr<Environment>()>;

class ArenaEnv final : public Environment {
 public:
  explicit ArenaEnv(ew_arena::EnvConfig cfg);

  std::size_t state_dim() const override { return ew_arena::kObservationDim; }
  std::size_t action_count() const override { return actions_; }
  std::size_t discrete_state_count() const override { return ew_arena::discrete_state_count(cfg_); }
  void reset(std::uint64_t seed) override;
  std::vector<double> observation() const override;
  std::size_t discrete_state() const override;
  EnvStep step(std::size_t action) override;

  const ew_arena::EnvConfig& config() const { return cfg_; }
  const ew_arena::ArenaState& state() const { return state_; }
  const ew_arena::StepInfo& last_info() const { return info_; }

 private:
  ew_arena::EnvConfig cfg_;
  std::size_t actions_;
  ew_arena::ArenaState state_;
  ew_arena::StepInfo info_;
  bool ready_ = false;
};

EnvFactory arena_factory(const ew_arena::EnvConfig& cfg);

// Seed used for the environment in episode `episode` of a run seeded `seed`.
std::uint64_t episode_seed(std::uint64_t seed, std::size_t episode);

using Policy = std::function<std::size_t(const Environment&)>;
using StepHook =
    std::function<void(std::size_t episode, std::size_t step, const Environment& after, std::size_t action,
                       const EnvStep& outcome)>;

// Rolls a fixed policy; epsilon and loss columns are zero.
metric_bench::RewardTrace run_policy(const EnvFactory& factory, const Policy& policy, std::size_t episodes,
                                     std::uint64_t seed, const StepHook& hook = {});

}  // namespace jamlab::q_forge
