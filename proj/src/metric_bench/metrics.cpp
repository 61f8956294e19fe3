#include "jamlab/metric_bench/metrics.hpp"

#include <cmath>

#include "jamlab/common/error.hpp"

namespace jamlab::metric_bench {

namespace {
const char* kNames[kClasses] = {"AJ", "RFTJ", "RDFTJ"};
}

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts)
    for (auto c : row) n += c;
  return n;
}

std::size_t ConfusionMatrix::correct() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < kClasses; ++k) n += counts[k][k];
  return n;
}

void ConfusionMatrix::add(int truth, int predicted) {
  require(truth >= 0 && truth < int(kClasses) && predicted >= 0 && predicted < int(kClasses),
          ErrorKind::invalid_label, "class index outside [0, 3)");
  ++counts[std::size_t(truth)][std::size_t(predicted)];
}

ConfusionMatrix ConfusionMatrix::from_predictions(const std::vector<int>& truth, const std::vector<int>& predicted) {
  require(truth.size() == predicted.size(), ErrorKind::shape_mismatch, "truth and prediction counts differ");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

Metrics classification_metrics(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  require(total > 0, ErrorKind::empty_matrix, "confusion matrix has no samples");
  Metrics m;
  std::size_t diag = 0;
  for (std::size_t j = 0; j < kClasses; ++j) diag += cm.counts[j][j];
  m.oa = double(diag) / double(total);

  auto flag = [&m](const std::string& what) {
    m.warning = true;
    m.warnings.push_back(what);
  };
  for (std::size_t j = 0; j < kClasses; ++j) {
    std::size_t row = 0, col = 0;
    for (std::size_t k = 0; k < kClasses; ++k) {
      row += cm.counts[j][k];
      col += cm.counts[k][j];
    }
    const double tp = double(cm.counts[j][j]);
    ClassMetrics& c = m.per_class[j];
    if (row) c.recall = tp / double(row);
    else flag(std::string("recall undefined for ") + kNames[j]);
    if (col) c.precision = tp / double(col);
    else flag(std::string("precision undefined for ") + kNames[j]);
    if (c.precision + c.recall > 0.0) c.f1 = 2.0 * c.precision * c.recall / (c.precision + c.recall);
    else flag(std::string("f1 undefined for ") + kNames[j]);
  }
  return m;
}

std::vector<double> moving_average(const std::vector<double>& trace, std::size_t window) {
  require(window >= 1, ErrorKind::invalid_window, "moving-average window must be at least 1");
  std::vector<double> out;
  if (trace.size() < window) return out;
  for (std::size_t i = 0; i + window <= trace.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = i; k < i + window; ++k) acc += trace[k];
    out.push_back(acc / double(window));
  }
  return out;
}

std::optional<std::size_t> convergence_speed(const std::vector<double>& trace, std::size_t window, double theta,
                                             double max_reward) {
  require(window >= 1, ErrorKind::invalid_window, "window must be at least 1");
  require(theta > 0.0 && theta <= 1.0, ErrorKind::invalid_params, "theta must lie in (0, 1]");
  const auto ma = moving_average(trace, window);
  for (std::size_t i = 0; i < ma.size(); ++i)
    if (ma[i] >= theta * max_reward) return i + window - 1;
  return std::nullopt;
}

double stability(const std::vector<double>& trace, std::size_t tail, std::size_t window) {
  const auto ma = moving_average(trace, window);
  require(tail >= 1 && tail <= ma.size(), ErrorKind::invalid_tail,
          "tail must lie in [1, " + std::to_string(ma.size()) + "]");
  double mean = 0.0;
  for (std::size_t i = ma.size() - tail; i < ma.size(); ++i) mean += ma[i];
  mean /= double(tail);
  double var = 0.0;
  for (std::size_t i = ma.size() - tail; i < ma.size(); ++i) var += (ma[i] - mean) * (ma[i] - mean);
  return std::sqrt(var / double(tail));
}

double encode_policy(int jammer_type, std::size_t action, std::size_t n_actions) {
  require(n_actions >= 2 && action < n_actions, ErrorKind::invalid_action, "action outside the action space");
  return double(jammer_type) + double(action) / double(n_actions - 1) / 2.0;
}

}  // namespace jamlab::metric_bench
