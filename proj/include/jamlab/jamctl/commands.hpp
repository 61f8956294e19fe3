#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "jamlab/jamctl/config.hpp"
#include "jamlab/metric_bench/metrics.hpp"
#include "jamlab/metric_bench/report.hpp"

namespace jamlab::jamctl {

// Output layout under RunConfig::out_dir.
std::filesystem::path dataset_dir(const RunConfig& cfg);
std::filesystem::path recognizer_dir(const RunConfig& cfg);
std::filesystem::path agent_dir(const RunConfig& cfg);
std::filesystem::path closed_loop_dir(const RunConfig& cfg);

signal_forge::Dataset cmd_gen_data(const RunConfig& cfg, std::ostream& log);

struct RecognizerRun {
  fusion_net::TrainResult training;
  metric_bench::ConfusionMatrix test_confusion;
  double test_oa = 0.0;
  double seconds = 0.0;
};

// Writes recognizer.fnet, history.csv, predictions.csv, confusion.csv and
// metrics.csv (test split).
RecognizerRun cmd_train_recognizer(const RunConfig& cfg, const std::filesystem::path& dataset, std::ostream& log);

struct AgentRun {
  metric_bench::RewardTrace dqn;
  metric_bench::RewardTrace sarsa;
  // Greedy DQN rollouts after training.
  metric_bench::RewardTrace greedy;
  std::vector<metric_bench::PolicyStep> policy;
  std::optional<metric_bench::ConfusionMatrix> recognition;
};

// Oracle labels; writes traces and the trained policies.
AgentRun cmd_train_agent(const RunConfig& cfg, std::ostream& log);

// Recognizer-in-the-loop unless cfg.run.oracle_labels.
AgentRun cmd_closed_loop(const RunConfig& cfg, const std::filesystem::path& checkpoint, std::ostream& log);

// Rebuilds <run_dir>/report from the traces stored in run_dir.
void cmd_report(const RunConfig& cfg, const std::filesystem::path& run_dir, std::ostream& log);

// Predicted labels for freshly synthesised scenes of each class.
ew_arena::RecognitionBank build_recognition_bank(const RunConfig& cfg, const fusion_net::Recognizer& net,
                                                 metric_bench::ConfusionMatrix* confusion = nullptr);

}  // namespace jamlab::jamctl
