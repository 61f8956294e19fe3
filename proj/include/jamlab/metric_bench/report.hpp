#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "jamlab/metric_bench/metrics.hpp"

namespace jamlab::metric_bench {

struct RewardTrace {
  std::vector<double> total_reward;
  std::vector<double> epsilon;
  std::vector<double> loss_mean;

  std::size_t episodes() const { return total_reward.size(); }
  void push(double reward, double eps, double loss);
};

struct PolicyStep {
  std::size_t episode = 0;
  std::size_t step = 0;
  int jammer_type = 0;
  std::size_t action = 0;
};

struct NamedTrace {
  std::string name;
  RewardTrace trace;
};

struct ReportInputs {
  std::optional<ConfusionMatrix> confusion;
  std::vector<NamedTrace> traces;
  std::vector<PolicyStep> policy;
  std::size_t n_actions = 30;
  std::size_t window = 50;
  double theta = 0.9;
  double max_episode_reward = 960.0;
  std::size_t stability_tail = 100;
};

// Columns: episode,total_reward,epsilon,loss_mean.
void write_reward_trace_csv(const std::filesystem::path& path, const RewardTrace& trace);
RewardTrace read_reward_trace_csv(const std::filesystem::path& path);
// Columns: true_class,AJ,RFTJ,RDFTJ.
void write_confusion_csv(const std::filesystem::path& path, const ConfusionMatrix& cm);
ConfusionMatrix read_confusion_csv(const std::filesystem::path& path);
// Columns: class,recall,precision,f1 plus an OA row.
void write_metrics_csv(const std::filesystem::path& path, const Metrics& m);
// Columns: episode,step,jammer_type,action,encoded.
void write_policy_trace_csv(const std::filesystem::path& path, const std::vector<PolicyStep>& steps,
                            std::size_t n_actions);
std::vector<PolicyStep> read_policy_trace_csv(const std::filesystem::path& path);

// Writes metrics.csv and confusion.csv (when a matrix is given), one
// reward_<name>.csv per trace, convergence.csv and policy_trace.csv.
void assemble_report(const ReportInputs& in, const std::filesystem::path& out_dir);

}  // namespace jamlab::metric_bench
