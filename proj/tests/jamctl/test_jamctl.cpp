#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "jamlab/common/error.hpp"
#include "jamlab/jamctl/commands.hpp"
#include "jamlab/metric_bench/metrics.hpp"

using namespace jamlab;
using namespace jamlab::jamctl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("jamlab_jamctl_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::trunc) << text; }

// Relative path -> bytes for every regular file under dir.
std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(JAMCTL_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig smoke_config(const fs::path& out) {
  RunConfig cfg = load_run_config(fs::path(JAMLAB_SOURCE_DIR) / "configs" / "smoke.json");
  cfg.out_dir = out;
  return cfg;
}

}  // namespace

TEST_CASE("run config: JSON round trip and strict parsing") {
  RunConfig c;
  c.apply_seed(99);
  c.env.strategy = ew_arena::Strategy::II;
  c.agent.epsilon.decay_episodes = 123;
  c.run.episodes = 17;
  const Json j = to_json(c);
  const RunConfig back = run_config_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.seed == 99);
  CHECK(back.dataset.seed == 99);
  CHECK(back.training.seed == 99);
  CHECK(back.env.strategy == ew_arena::Strategy::II);

  const auto dir = scratch("config");
  save_run_config(dir / "c.json", c);
  CHECK(to_json(load_run_config(dir / "c.json")) == j);

  CHECK(to_json(run_config_from_json(Json::object())) == to_json(RunConfig{}));
  auto parse_kind = [](const Json& bad) {
    try {
      run_config_from_json(bad);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::invalid_params;
  };
  CHECK(parse_kind(Json{{"bogus", 1}}) == ErrorKind::config_parse);
  CHECK(parse_kind(Json{{"agent", {{"gama", 0.5}}}}) == ErrorKind::config_parse);
  CHECK(parse_kind(Json{{"dataset", {{"seed", 3}}}}) == ErrorKind::config_parse);
  CHECK(parse_kind(Json{{"env", {{"strategy", "IV"}}}}) == ErrorKind::config_parse);
  CHECK(parse_kind(Json{{"seed", "one"}}) == ErrorKind::config_parse);

  try {
    load_run_config(dir / "missing.json");
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
  write_text(dir / "broken.json", "{ \"seed\": ");
  CHECK_THROWS_AS(load_run_config(dir / "broken.json"), Error);

  RunConfig mismatch;
  mismatch.features.side = 32;
  CHECK_THROWS_AS(mismatch.validate(), Error);
  fs::remove_all(dir);
}

TEST_CASE("gen-data: balanced classes and a seed-determined directory") {
  const auto root = scratch("gen");
  RunConfig cfg;
  cfg.dataset.counts = {20, 20, 20};
  cfg.out_dir = root / "a";
  std::ostringstream log;
  const auto ds = cmd_gen_data(cfg, log);
  const auto hist = ds.class_histogram();
  CHECK(hist[0] == 20);
  CHECK(hist[1] == 20);
  CHECK(hist[2] == 20);
  CHECK(log.str().find("60 scenes") != std::string::npos);
  CHECK(fs::exists(dataset_dir(cfg) / "config.json"));

  RunConfig again = cfg;
  again.out_dir = root / "b";
  cmd_gen_data(again, log);
  auto a = tree(dataset_dir(cfg));
  auto b = tree(dataset_dir(again));
  CHECK(a.at("config.json") != b.at("config.json"));
  a.erase("config.json");
  b.erase("config.json");
  CHECK(a == b);

  RunConfig other = cfg;
  other.apply_seed(2);
  other.out_dir = root / "c";
  cmd_gen_data(other, log);
  CHECK(slurp(dataset_dir(cfg) / "manifest.json") != slurp(dataset_dir(other) / "manifest.json"));
  fs::remove_all(root);
}

TEST_CASE("train-recognizer: toy run, printed OA matches saved predictions, missing class") {
  const auto root = scratch("rec");
  RunConfig cfg = smoke_config(root);
  std::ostringstream gen_log;
  cmd_gen_data(cfg, gen_log);

  std::ostringstream log;
  const auto run = cmd_train_recognizer(cfg, dataset_dir(cfg), log);
  CHECK(run.training.history.size() == 2);
  const std::string history = slurp(recognizer_dir(cfg) / "history.csv");
  CHECK(std::count(history.begin(), history.end(), '\n') == 3);
  CHECK(fs::exists(recognizer_dir(cfg) / "recognizer.fnet"));

  // Recompute OA from predictions.csv.
  std::ifstream in(recognizer_dir(cfg) / "predictions.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "scene_id,split,true_class,predicted_class");
  std::vector<int> truth, predicted;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string id, split, t, p;
    std::getline(ss, id, ',');
    std::getline(ss, split, ',');
    std::getline(ss, t, ',');
    std::getline(ss, p, ',');
    CHECK(split == "test");
    truth.push_back(int(signal_forge::jamming_kind_from_string(t)));
    predicted.push_back(int(signal_forge::jamming_kind_from_string(p)));
  }
  REQUIRE(!truth.empty());
  const auto m = metric_bench::classification_metrics(metric_bench::ConfusionMatrix::from_predictions(truth, predicted));
  CHECK(m.oa == run.test_oa);
  char expected[64];
  std::snprintf(expected, sizeof(expected), "test OA %.6f", m.oa);
  CHECK(log.str().find(expected) != std::string::npos);
  CHECK(log.str().find("final val OA") != std::string::npos);

  // Drop every RDFTJ scene from the manifest.
  auto manifest = Json::parse(slurp(dataset_dir(cfg) / "manifest.json"));
  Json kept = Json::array();
  for (const auto& s : manifest.at("scenes"))
    if (s.at("label") != "RDFTJ") kept.push_back(s);
  manifest["scenes"] = kept;
  const auto pruned = root / "pruned";
  fs::create_directories(pruned);
  for (const auto& e : fs::directory_iterator(dataset_dir(cfg)))
    if (e.path().extension() == ".cpx") fs::copy_file(e.path(), pruned / e.path().filename());
  write_text(pruned / "manifest.json", manifest.dump());
  try {
    cmd_train_recognizer(cfg, pruned, log);
    FAIL("expected missing-class error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::missing_class);
  }
  CHECK_THROWS_AS(cmd_train_recognizer(cfg, root / "no_dataset", log), Error);
  fs::remove_all(root);
}

TEST_CASE("closed-loop: oracle labels on the fixed AJ scenario reach the known maximum") {
  const auto root = scratch("oracle");
  RunConfig cfg;
  cfg.out_dir = root;
  cfg.run.oracle_labels = true;
  cfg.run.episodes = 400;
  cfg.run.policy_episodes = 5;
  std::ostringstream log;
  const auto run = cmd_closed_loop(cfg, root / "unused.fnet", log);
  REQUIRE(run.greedy.episodes() == 5);
  double total = 0.0;
  for (double r : run.greedy.total_reward) total += r;
  const double per_step = total / double(5 * cfg.env.cpis_per_episode);
  CHECK(per_step >= 0.95 * 30.0);
  CHECK(!run.recognition);
  CHECK(fs::exists(closed_loop_dir(cfg) / "reward_dqn.csv"));
  CHECK(fs::exists(closed_loop_dir(cfg) / "policy_trace.csv"));
  CHECK(!fs::exists(closed_loop_dir(cfg) / "confusion.csv"));
  fs::remove_all(root);
}

TEST_CASE("closed-loop: strategy II palindrome, repeatable traces and reports") {
  const auto root = scratch("loop");
  RunConfig cfg = smoke_config(root / "a");
  cfg.env.strategy = ew_arena::Strategy::II;
  std::ostringstream log;
  cmd_gen_data(cfg, log);
  cmd_train_recognizer(cfg, dataset_dir(cfg), log);
  const auto ckpt = recognizer_dir(cfg) / "recognizer.fnet";
  const auto run = cmd_closed_loop(cfg, ckpt, log);
  REQUIRE(run.recognition);

  const auto policy = metric_bench::read_policy_trace_csv(closed_loop_dir(cfg) / "policy_trace.csv");
  REQUIRE(policy.size() == cfg.env.cpis_per_episode);
  const int palindrome[4] = {0, 1, 2, 1};
  for (std::size_t t = 0; t < policy.size(); ++t) CHECK(policy[t].jammer_type == palindrome[t % 4]);

  RunConfig twin = cfg;
  twin.out_dir = root / "b";
  fs::create_directories(twin.out_dir);
  cmd_closed_loop(twin, ckpt, log);
  auto a = tree(closed_loop_dir(cfg));
  auto b = tree(closed_loop_dir(twin));
  // The echoed config names its own output directory.
  a.erase("config.json");
  b.erase("config.json");
  CHECK(a == b);

  cmd_report(cfg, closed_loop_dir(cfg), log);
  const auto first = tree(closed_loop_dir(cfg) / "report");
  cmd_report(cfg, closed_loop_dir(cfg), log);
  CHECK(tree(closed_loop_dir(cfg) / "report") == first);
  CHECK(!first.empty());
  CHECK_THROWS_AS(cmd_report(cfg, root / "nothing", log), Error);
  fs::remove_all(root);
}

TEST_CASE("jamctl binary: exit codes") {
  const auto root = scratch("cli");
  const std::string smoke = (fs::path(JAMLAB_SOURCE_DIR) / "configs" / "smoke.json").string();
  const std::string out = " --out " + (root / "run").string();

  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate --config " + smoke) == 2);
  CHECK(run_cli("gen-data") == 2);
  CHECK(run_cli("gen-data --config " + (root / "missing.json").string()) == 3);
  write_text(root / "broken.json", "{ \"seed\": ");
  CHECK(run_cli("gen-data --config " + (root / "broken.json").string()) == 2);
  write_text(root / "unknown.json", "{ \"sed\": 4 }");
  CHECK(run_cli("gen-data --config " + (root / "unknown.json").string()) == 2);
  CHECK(run_cli("gen-data --strategy IV --config " + smoke) == 2);

  CHECK(run_cli("gen-data --config " + smoke + out + " --seed 11") == 0);
  CHECK(fs::exists(root / "run" / "dataset" / "manifest.json"));
  CHECK(run_cli("train-recognizer --config " + smoke + out + " --dataset " + (root / "nope").string()) == 3);
  write_text(root / "bad.fnet", "not a checkpoint");
  CHECK(run_cli("closed-loop --config " + smoke + out + " --checkpoint " + (root / "bad.fnet").string()) == 3);
  CHECK(run_cli("report --config " + smoke + out + " --run-dir " + (root / "none").string()) == 3);
  fs::remove_all(root);
}
