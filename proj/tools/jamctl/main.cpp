#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "jamlab/common/error.hpp"
#include "jamlab/jamctl/commands.hpp"

using namespace jamlab;
using namespace jamlab::jamctl;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io:
    case ErrorKind::checkpoint_load: return 3;
    case ErrorKind::numeric: return 4;
    default: return 2;
  }
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  bool oracle_labels = false;
  std::string strategy;
  std::string out;
  std::string dataset;
  std::string checkpoint;
  std::string run_dir;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Run config (JSON)")->required();
  cmd->add_option("--seed", o.seed, "Override the config seed");
  cmd->add_option("--out", o.out, "Override the output directory");
  cmd->add_option("--strategy", o.strategy, "Jammer strategy: fixed, I, II or III")
      ->check(CLI::IsMember({"fixed", "I", "II", "III"}));
  cmd->add_flag("--oracle-labels", o.oracle_labels, "Use true jammer types instead of the recognizer");
}

RunConfig resolve(const Options& o) {
  RunConfig cfg = load_run_config(o.config);
  if (o.seed) cfg.apply_seed(*o.seed);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (!o.strategy.empty()) cfg.env.strategy = ew_arena::strategy_from_string(o.strategy);
  if (o.oracle_labels) cfg.run.oracle_labels = true;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jamlab experiment driver"};
  app.require_subcommand(1);
  Options o;
  auto* gen = app.add_subcommand("gen-data", "Generate the labelled echo dataset");
  auto* rec = app.add_subcommand("train-recognizer", "Train the jamming recognizer");
  auto* agent = app.add_subcommand("train-agent", "Train DQN and SARSA with oracle labels");
  auto* loop = app.add_subcommand("closed-loop", "Train the agents with the recognizer in the loop");
  auto* report = app.add_subcommand("report", "Rebuild the report of a closed-loop or agent run");
  for (auto* c : {gen, rec, agent, loop, report}) add_common(c, o);
  rec->add_option("--dataset", o.dataset, "Dataset directory (default <out>/dataset)");
  loop->add_option("--checkpoint", o.checkpoint, "Recognizer checkpoint (default <out>/recognizer/recognizer.fnet)");
  report->add_option("--run-dir", o.run_dir, "Run directory (default <out>/closed_loop)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const RunConfig cfg = resolve(o);
    std::ostream& log = std::cout;
    if (gen->parsed()) {
      cmd_gen_data(cfg, log);
    } else if (rec->parsed()) {
      cmd_train_recognizer(cfg, o.dataset.empty() ? dataset_dir(cfg) : std::filesystem::path(o.dataset), log);
    } else if (agent->parsed()) {
      cmd_train_agent(cfg, log);
    } else if (loop->parsed()) {
      const auto ckpt = o.checkpoint.empty() ? recognizer_dir(cfg) / "recognizer.fnet" : std::filesystem::path(o.checkpoint);
      cmd_closed_loop(cfg, ckpt, log);
    } else if (report->parsed()) {
      cmd_report(cfg, o.run_dir.empty() ? closed_loop_dir(cfg) : std::filesystem::path(o.run_dir), log);
    }
  } catch (const Error& e) {
    std::cerr << "jamctl: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "jamctl: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
