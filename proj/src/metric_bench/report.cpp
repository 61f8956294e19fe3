#include "jamlab/metric_bench/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "jamlab/common/error.hpp"

namespace jamlab::metric_bench {

namespace fs = std::filesystem;

namespace {

const char* kNames[kClasses] = {"AJ", "RFTJ", "RDFTJ"};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  require(bool(out), ErrorKind::io, "cannot write " + path.string());
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<std::vector<std::string>> read_rows(const fs::path& path, std::size_t columns) {
  std::ifstream in(path);
  require(bool(in), ErrorKind::io, "cannot read " + path.string());
  std::string line;
  require(bool(std::getline(in, line)), ErrorKind::io, path.string() + " is empty");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    require(cells.size() == columns, ErrorKind::io, "malformed row in " + path.string());
    rows.push_back(std::move(cells));
  }
  return rows;
}

double to_double(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw Error(ErrorKind::io, "bad number '" + s + "'");
  }
}

}  // namespace

void RewardTrace::push(double reward, double eps, double loss) {
  total_reward.push_back(reward);
  epsilon.push_back(eps);
  loss_mean.push_back(loss);
}

void write_reward_trace_csv(const fs::path& path, const RewardTrace& trace) {
  auto out = open_out(path);
  out << "episode,total_reward,epsilon,loss_mean\n";
  for (std::size_t e = 0; e < trace.episodes(); ++e)
    out << e << ',' << num(trace.total_reward[e]) << ',' << num(trace.epsilon[e]) << ',' << num(trace.loss_mean[e])
        << '\n';
  require(bool(out), ErrorKind::io, "write failed for " + path.string());
}

RewardTrace read_reward_trace_csv(const fs::path& path) {
  RewardTrace t;
  for (const auto& r : read_rows(path, 4)) t.push(to_double(r[1]), to_double(r[2]), to_double(r[3]));
  return t;
}

void write_confusion_csv(const fs::path& path, const ConfusionMatrix& cm) {
  auto out = open_out(path);
  out << "true_class,AJ,RFTJ,RDFTJ\n";
  for (std::size_t j = 0; j < kClasses; ++j)
    out << kNames[j] << ',' << cm.counts[j][0] << ',' << cm.counts[j][1] << ',' << cm.counts[j][2] << '\n';
  require(bool(out), ErrorKind::io, "write failed for " + path.string());
}

ConfusionMatrix read_confusion_csv(const fs::path& path) {
  const auto rows = read_rows(path, 4);
  require(rows.size() == kClasses, ErrorKind::io, "confusion matrix needs three rows");
  ConfusionMatrix cm;
  for (std::size_t j = 0; j < kClasses; ++j)
    for (std::size_t k = 0; k < kClasses; ++k) cm.counts[j][k] = std::size_t(to_double(rows[j][k + 1]));
  return cm;
}

void write_metrics_csv(const fs::path& path, const Metrics& m) {
  auto out = open_out(path);
  out << "class,recall,precision,f1\n";
  for (std::size_t j = 0; j < kClasses; ++j)
    out << kNames[j] << ',' << num(m.per_class[j].recall) << ',' << num(m.per_class[j].precision) << ','
        << num(m.per_class[j].f1) << '\n';
  out << "OA," << num(m.oa) << ",,\n";
  require(bool(out), ErrorKind::io, "write failed for " + path.string());
}

void write_policy_trace_csv(const fs::path& path, const std::vector<PolicyStep>& steps, std::size_t n_actions) {
  auto out = open_out(path);
  out << "episode,step,jammer_type,action,encoded\n";
  for (const auto& s : steps)
    out << s.episode << ',' << s.step << ',' << s.jammer_type << ',' << s.action << ','
        << num(encode_policy(s.jammer_type, s.action, n_actions)) << '\n';
  require(bool(out), ErrorKind::io, "write failed for " + path.string());
}

std::vector<PolicyStep> read_policy_trace_csv(const fs::path& path) {
  std::vector<PolicyStep> steps;
  for (const auto& r : read_rows(path, 5))
    steps.push_back({std::size_t(to_double(r[0])), std::size_t(to_double(r[1])), int(to_double(r[2])),
                     std::size_t(to_double(r[3]))});
  return steps;
}

void assemble_report(const ReportInputs& in, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  require(!ec && fs::is_directory(out_dir), ErrorKind::io, "cannot create " + out_dir.string());
  if (in.confusion) {
    write_confusion_csv(out_dir / "confusion.csv", *in.confusion);
    write_metrics_csv(out_dir / "metrics.csv", classification_metrics(*in.confusion));
  }
  auto conv = open_out(out_dir / "convergence.csv");
  conv << "trace,episodes,window,theta,convergence_episode,stability\n";
  for (const auto& t : in.traces) {
    write_reward_trace_csv(out_dir / ("reward_" + t.name + ".csv"), t.trace);
    const auto& r = t.trace.total_reward;
    const auto at = r.size() >= in.window ? convergence_speed(r, in.window, in.theta, in.max_episode_reward)
                                          : std::nullopt;
    const auto ma_len = r.size() >= in.window ? r.size() - in.window + 1 : 0;
    conv << t.name << ',' << r.size() << ',' << in.window << ',' << num(in.theta) << ','
         << (at ? std::to_string(*at) : std::string("none")) << ','
         << (ma_len >= in.stability_tail && in.stability_tail > 0 ? num(stability(r, in.stability_tail, in.window))
                                                                  : std::string("none"))
         << '\n';
  }
  require(bool(conv), ErrorKind::io, "write failed for convergence.csv");
  if (!in.policy.empty()) write_policy_trace_csv(out_dir / "policy_trace.csv", in.policy, in.n_actions);
}

}  // namespace jamlab::metric_bench
