#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace jamlab::metric_bench {

inline constexpr std::size_t kClasses = 3;

// Rows are the true class, columns the predicted class.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kClasses>, kClasses> counts{};

  std::size_t total() const;
  std::size_t correct() const;
  void add(int truth, int predicted);
  static ConfusionMatrix from_predictions(const std::vector<int>& truth, const std::vector<int>& predicted);
};

struct ClassMetrics {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

struct Metrics {
  double oa = 0.0;
  std::array<ClassMetrics, kClasses> per_class{};
  // Set when a zero denominator forced a 0 sentinel.
  bool warning = false;
  std::vector<std::string> warnings;
};

// Throws empty-matrix when the matrix has no samples.
Metrics classification_metrics(const ConfusionMatrix& cm);

// Trailing moving average; element i averages episodes [i, i + window).
std::vector<double> moving_average(const std::vector<double>& trace, std::size_t window);

// First episode whose trailing window-length mean reaches theta * max_reward.
std::optional<std::size_t> convergence_speed(const std::vector<double>& trace, std::size_t window, double theta,
                                             double max_reward);

// Population standard deviation of the last `tail` moving-average values.
double stability(const std::vector<double>& trace, std::size_t tail, std::size_t window);

// Jammer type as the integer part, normalised action / 2 as the fraction.
double encode_policy(int jammer_type, std::size_t action, std::size_t n_actions);

}  // namespace jamlab::metric_bench
