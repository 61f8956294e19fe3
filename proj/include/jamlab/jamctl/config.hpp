#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "jamlab/common/json_util.hpp"
#include "jamlab/ew_arena/arena.hpp"
#include "jamlab/fusion_net/training.hpp"
#include "jamlab/q_forge/agent.hpp"
#include "jamlab/signal_forge/dataset.hpp"

namespace jamlab::jamctl {

struct AgentRunConfig {
  std::size_t episodes = 1000;
  // Synthesised scenes per class that the recognizer labels for the arena.
  std::size_t bank_scenes_per_class = 64;
  bool oracle_labels = false;
  // Greedy DQN rollouts recorded in policy_trace.csv.
  std::size_t policy_episodes = 2;
};

struct ReportConfig {
  std::size_t window = 50;
  double theta = 0.9;
  std::size_t stability_tail = 100;
};

// A single seed drives every stage: it replaces the dataset and training
// seeds and seeds the agents.
struct RunConfig {
  std::uint64_t seed = 1;
  signal_forge::DatasetConfig dataset;
  tf_atlas::FeatureOptions features;
  fusion_net::RecognizerConfig recognizer;
  fusion_net::TrainConfig training;
  ew_arena::EnvConfig env;
  q_forge::AgentConfig agent;
  AgentRunConfig run;
  ReportConfig report;
  std::filesystem::path out_dir = "runs/default";

  void apply_seed(std::uint64_t s);
  void validate() const;
};

Json to_json(const RunConfig& c);
// Missing keys keep their defaults; unknown keys raise config-parse.
RunConfig run_config_from_json(const Json& j);
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const std::filesystem::path& path, const RunConfig& c);

}  // namespace jamlab::jamctl
