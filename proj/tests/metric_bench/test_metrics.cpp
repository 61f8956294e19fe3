#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "jamlab/common/error.hpp"
#include "jamlab/common/rng.hpp"
#include "jamlab/metric_bench/report.hpp"

using namespace jamlab;
using namespace jamlab::metric_bench;
namespace fs = std::filesystem;

namespace {

ConfusionMatrix fig10() {
  ConfusionMatrix cm;
  cm.counts = {{{235, 0, 0}, {0, 185, 59}, {0, 5, 746}}};
  return cm;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("classification metrics on the published confusion matrix") {
  const auto m = classification_metrics(fig10());
  CHECK(std::abs(m.oa - 1166.0 / 1230.0) < 1e-12);
  CHECK(std::abs(m.per_class[1].recall - 185.0 / 244.0) < 1e-12);
  CHECK(std::abs(m.per_class[2].precision - 746.0 / 805.0) < 1e-12);
  // F1 = 2 TP / (2 TP + FP + FN) = 370 / 434.
  CHECK(std::abs(m.per_class[1].f1 - 370.0 / 434.0) < 1e-12);
  CHECK(m.oa == doctest::Approx(0.9480).epsilon(1e-4));
  CHECK(!m.warning);
}

TEST_CASE("perfect predictor and metric identities") {
  ConfusionMatrix id;
  id.counts = {{{10, 0, 0}, {0, 10, 0}, {0, 0, 10}}};
  const auto m = classification_metrics(id);
  CHECK(m.oa == 1.0);
  for (const auto& c : m.per_class) {
    CHECK(c.recall == 1.0);
    CHECK(c.precision == 1.0);
    CHECK(c.f1 == 1.0);
  }

  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    ConfusionMatrix cm;
    for (auto& row : cm.counts)
      for (auto& c : row) c = 1 + uniform_index(rng, 50);
    const auto r = classification_metrics(cm);
    // OA is the count-weighted mean of per-class recall.
    double weighted = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
      const double row = double(cm.counts[j][0] + cm.counts[j][1] + cm.counts[j][2]);
      weighted += row * r.per_class[j].recall;
    }
    REQUIRE(std::abs(weighted / double(cm.total()) - r.oa) < 1e-12);
    for (const auto& c : r.per_class) {
      REQUIRE(c.f1 >= std::min(c.precision, c.recall) - 1e-15);
      REQUIRE(c.f1 <= std::max(c.precision, c.recall) + 1e-15);
    }
    // Relabelling classes permutes the per-class metrics.
    const std::array<std::size_t, 3> perm{2, 0, 1};
    ConfusionMatrix p;
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) p.counts[perm[a]][perm[b]] = cm.counts[a][b];
    const auto rp = classification_metrics(p);
    REQUIRE(rp.oa == r.oa);
    for (std::size_t j = 0; j < 3; ++j) REQUIRE(rp.per_class[perm[j]].f1 == r.per_class[j].f1);
  }
}

TEST_CASE("zero denominators give 0 with a warning, empty matrix throws") {
  ConfusionMatrix cm;
  cm.counts = {{{5, 0, 0}, {0, 0, 0}, {0, 0, 4}}};
  const auto m = classification_metrics(cm);
  CHECK(m.warning);
  CHECK(m.per_class[1].recall == 0.0);
  CHECK(m.per_class[1].precision == 0.0);
  CHECK(m.per_class[1].f1 == 0.0);
  CHECK(m.oa == 1.0);
  try {
    classification_metrics(ConfusionMatrix{});
    FAIL("expected empty-matrix");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_matrix);
  }
}

TEST_CASE("convergence speed") {
  CHECK(convergence_speed(std::vector<double>(200, 960.0), 50, 0.9, 960.0) == std::optional<std::size_t>(49));
  CHECK_FALSE(convergence_speed(std::vector<double>(200, 100.0), 50, 0.9, 960.0).has_value());

  // Zeros until episode 500, max afterwards. The window ending at e holds
  // e - 499 maxima, which first reaches 45 of 50 at e = 544.
  std::vector<double> step(1000, 0.0);
  for (std::size_t e = 500; e < step.size(); ++e) step[e] = 30.0;
  const auto at = convergence_speed(step, 50, 0.9, 30.0);
  REQUIRE(at.has_value());
  CHECK(*at >= 544);
  CHECK(*at <= 546);
  CHECK(*at == 544);
  CHECK_THROWS_AS(convergence_speed(step, 0, 0.9, 30.0), Error);
}

TEST_CASE("stability") {
  CHECK(stability(std::vector<double>(300, 7.0), 100, 50) == 0.0);
  std::vector<double> alt;
  for (int i = 0; i < 40; ++i) alt.push_back(i % 2 ? 1.0 : -1.0);
  CHECK(stability(alt, 20, 1) == doctest::Approx(1.0).epsilon(1e-15));

  Rng rng(8);
  std::vector<double> trace(400);
  for (double& v : trace) v = uniform(rng, -100.0, 960.0);
  // Two-pass oracle on an independently computed moving average.
  std::vector<double> ma;
  for (std::size_t i = 49; i < trace.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = i - 49; k <= i; ++k) s += trace[k];
    ma.push_back(s / 50.0);
  }
  double mean = 0.0;
  for (std::size_t i = ma.size() - 100; i < ma.size(); ++i) mean += ma[i];
  mean /= 100.0;
  double var = 0.0;
  for (std::size_t i = ma.size() - 100; i < ma.size(); ++i) var += (ma[i] - mean) * (ma[i] - mean);
  CHECK(std::abs(stability(trace, 100, 50) - std::sqrt(var / 100.0)) < 1e-12);

  try {
    stability(trace, 400, 50);
    FAIL("expected invalid-tail");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_tail);
  }
}

TEST_CASE("policy encoding") {
  CHECK(encode_policy(0, 29, 30) == 0.5);
  CHECK(encode_policy(2, 0, 30) == 2.0);
  CHECK(encode_policy(1, 29, 30) < 2.0);
  CHECK_THROWS_AS(encode_policy(0, 30, 30), Error);
}

TEST_CASE("assemble_report writes CSVs and is reproducible") {
  const auto a = fs::temp_directory_path() / "jamlab_report_a";
  const auto b = fs::temp_directory_path() / "jamlab_report_b";
  fs::remove_all(a);
  fs::remove_all(b);
  ReportInputs in;
  in.confusion = fig10();
  RewardTrace t;
  for (int e = 0; e < 300; ++e) t.push(e < 100 ? 0.0 : 960.0, 0.05, 1.5);
  in.traces.push_back({"dqn", t});
  in.policy = {{0, 0, 0, 29}, {0, 1, 2, 0}};
  assemble_report(in, a);
  assemble_report(in, b);
  for (const char* f : {"metrics.csv", "confusion.csv", "reward_dqn.csv", "convergence.csv", "policy_trace.csv"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(slurp(a / "policy_trace.csv") == "episode,step,jammer_type,action,encoded\n0,0,0,29,0.5\n0,1,2,0,2\n");
  const auto cm = read_confusion_csv(a / "confusion.csv");
  CHECK(cm.counts == fig10().counts);
  const auto back = read_reward_trace_csv(a / "reward_dqn.csv");
  CHECK(back.total_reward == t.total_reward);
  CHECK(slurp(a / "convergence.csv").find("dqn,300,50,0.9,144,") != std::string::npos);
  CHECK_THROWS_AS(assemble_report(in, "/proc/forbidden/report"), Error);
  fs::remove_all(a);
  fs::remove_all(b);
}
