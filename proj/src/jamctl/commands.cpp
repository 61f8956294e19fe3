#include "jamlab/jamctl/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include "jamlab/common/parallel.hpp"
#include "jamlab/fusion_net/layers.hpp"
#include "jamlab/q_forge/environment.hpp"

namespace jamlab::jamctl {

namespace fs = std::filesystem;

namespace {

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorKind::io, "cannot create directory " + dir.string());
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

void write_predictions_csv(const fs::path& path, const signal_forge::Dataset& ds, const std::vector<std::size_t>& which,
                           const std::vector<int>& predicted) {
  std::ofstream out(path, std::ios::trunc);
  require(bool(out), ErrorKind::io, "cannot write " + path.string());
  out << "scene_id,split,true_class,predicted_class\n";
  for (std::size_t i = 0; i < which.size(); ++i) {
    const auto& rec = ds.scenes[which[i]];
    out << rec.id << ',' << signal_forge::to_string(rec.split) << ',' << signal_forge::to_string(rec.label) << ','
        << signal_forge::to_string(signal_forge::JammingKind(predicted[i])) << '\n';
  }
  require(bool(out), ErrorKind::io, "write failed for " + path.string());
}

void write_q_table_csv(const fs::path& path, const q_forge::QTable& q) {
  std::ofstream out(path, std::ios::trunc);
  require(bool(out), ErrorKind::io, "cannot write " + path.string());
  out << "state,action,q\n";
  char line[96];
  for (std::size_t s = 0; s < q.states(); ++s)
    for (std::size_t a = 0; a < q.actions(); ++a) {
      std::snprintf(line, sizeof(line), "%zu,%zu,%.10g\n", s, a, q.at(s, a));
      out << line;
    }
  require(bool(out), ErrorKind::io, "write failed for " + path.string());
}

void log_trace(std::ostream& log, const char* name, const metric_bench::RewardTrace& t, const RunConfig& cfg) {
  const auto conv = metric_bench::convergence_speed(t.total_reward, cfg.report.window, cfg.report.theta,
                                                    cfg.env.max_episode_reward());
  log << name << ": converged at episode " << (conv ? std::to_string(*conv) : std::string("never"));
  if (t.episodes() >= cfg.report.stability_tail + cfg.report.window - 1)
    log << ", tail stability "
        << fmt("%.4f", metric_bench::stability(t.total_reward, cfg.report.stability_tail, cfg.report.window));
  log << '\n';
}

AgentRun run_agents(const RunConfig& cfg, const ew_arena::EnvConfig& env, const fs::path& dir,
                    std::optional<metric_bench::ConfusionMatrix> recognition, std::ostream& log) {
  make_dir(dir);
  save_run_config(dir / "config.json", cfg);
  const auto factory = q_forge::arena_factory(env);
  const std::size_t every = std::max<std::size_t>(1, cfg.run.episodes / 10);
  auto progress = [&](const char* name) {
    return [&log, name, every, &cfg](std::size_t e, double total) {
      if ((e + 1) % every == 0 || e + 1 == cfg.run.episodes)
        log << name << " episode " << e + 1 << "/" << cfg.run.episodes << " reward " << fmt("%.1f", total) << '\n';
    };
  };
  auto dqn = q_forge::train_dqn(factory, cfg.agent, cfg.run.episodes, cfg.seed, progress("dqn"));
  auto sarsa = q_forge::train_sarsa(factory, cfg.agent, cfg.run.episodes, cfg.seed, nullptr, progress("sarsa"));
  fusion_net::save_checkpoint(dir / "dqn.fnet", dqn.policy.params());
  write_q_table_csv(dir / "sarsa_q.csv", sarsa.table);

  AgentRun run{dqn.trace, sarsa.trace, {}, {}, recognition};
  std::vector<ew_arena::EpisodeLogRow> rows;
  run.greedy = q_forge::run_policy(factory, q_forge::greedy_policy(dqn.policy), cfg.run.policy_episodes,
                      derive_seed(cfg.seed, 0x9011C7ULL),
                      [&](std::size_t e, std::size_t t, const q_forge::Environment& after, std::size_t a,
                          const q_forge::EnvStep&) {
                        const auto& info = static_cast<const q_forge::ArenaEnv&>(after).last_info();
                        run.policy.push_back({e, t, int(info.jammer_type), a});
                        rows.push_back({e, t, info});
                      });
  ew_arena::write_episode_log(dir / "episode_log.csv", rows);

  metric_bench::ReportInputs in;
  in.confusion = recognition;
  in.traces = {{"dqn", run.dqn}, {"sarsa", run.sarsa}};
  in.policy = run.policy;
  in.n_actions = env.actions().size();
  in.window = cfg.report.window;
  in.theta = cfg.report.theta;
  in.max_episode_reward = env.max_episode_reward();
  in.stability_tail = cfg.report.stability_tail;
  metric_bench::assemble_report(in, dir);
  log_trace(log, "dqn", run.dqn, cfg);
  log_trace(log, "sarsa", run.sarsa, cfg);
  double greedy_total = 0.0;
  for (double r : run.greedy.total_reward) greedy_total += r;
  if (run.greedy.episodes())
    log << "greedy dqn: mean reward per episode " << fmt("%.2f", greedy_total / double(run.greedy.episodes()))
        << " of " << fmt("%.0f", env.max_episode_reward()) << '\n';
  return run;
}

}  // namespace

fs::path dataset_dir(const RunConfig& cfg) { return cfg.out_dir / "dataset"; }
fs::path recognizer_dir(const RunConfig& cfg) { return cfg.out_dir / "recognizer"; }
fs::path agent_dir(const RunConfig& cfg) { return cfg.out_dir / "agent"; }
fs::path closed_loop_dir(const RunConfig& cfg) { return cfg.out_dir / "closed_loop"; }

signal_forge::Dataset cmd_gen_data(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const auto dir = dataset_dir(cfg);
  auto ds = signal_forge::gen_dataset(cfg.dataset, dir);
  save_run_config(dir / "config.json", cfg);
  const auto hist = ds.class_histogram();
  log << "dataset " << dir.string() << ": " << ds.scenes.size() << " scenes (AJ " << hist[0] << ", RFTJ " << hist[1]
      << ", RDFTJ " << hist[2] << "), train " << ds.in_split(signal_forge::Split::train).size() << ", val "
      << ds.in_split(signal_forge::Split::val).size() << ", test " << ds.in_split(signal_forge::Split::test).size()
      << '\n';
  return ds;
}

RecognizerRun cmd_train_recognizer(const RunConfig& cfg, const fs::path& dataset, std::ostream& log) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto ds = signal_forge::load_dataset(dataset);
  const auto dir = recognizer_dir(cfg);
  make_dir(dir);
  save_run_config(dir / "config.json", cfg);

  const auto bank = fusion_net::build_feature_bank(ds, cfg.features);
  log << "features ready for " << bank.labels.size() << " scenes\n";
  fusion_net::Recognizer net(cfg.recognizer, derive_seed(cfg.seed, 0x4EC0ULL));
  RecognizerRun run;
  run.training = fusion_net::train_recognizer(net, bank, cfg.training, [&](const fusion_net::EpochRecord& r) {
    log << "epoch " << r.epoch << " train_loss " << fmt("%.5f", r.train_loss) << " val_oa " << fmt("%.4f", r.val_oa)
        << '\n';
  });
  fusion_net::save_checkpoint(dir / "recognizer.fnet", net.params());
  fusion_net::write_history_csv(dir / "history.csv", run.training.history);

  const auto test = bank.indices(signal_forge::Split::test);
  if (!test.empty()) {
    const auto predicted = fusion_net::predict(net, bank, test);
    std::vector<int> truth;
    for (auto i : test) truth.push_back(bank.labels[i]);
    write_predictions_csv(dir / "predictions.csv", ds, test, predicted);
    run.test_confusion = metric_bench::ConfusionMatrix::from_predictions(truth, predicted);
    const auto m = metric_bench::classification_metrics(run.test_confusion);
    run.test_oa = m.oa;
    metric_bench::write_confusion_csv(dir / "confusion.csv", run.test_confusion);
    metric_bench::write_metrics_csv(dir / "metrics.csv", m);
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  log << "final val OA " << fmt("%.6f", run.training.history.back().val_oa) << " (best "
      << fmt("%.6f", run.training.best_val_oa) << " at epoch " << run.training.best_epoch << ")\n";
  if (!test.empty())
    log << "test OA " << fmt("%.6f", run.test_oa) << " (" << run.test_confusion.correct() << "/"
        << run.test_confusion.total() << ")\n";
  return run;
}

ew_arena::RecognitionBank build_recognition_bank(const RunConfig& cfg, const fusion_net::Recognizer& net,
                                                 metric_bench::ConfusionMatrix* confusion) {
  const std::size_t per = cfg.run.bank_scenes_per_class;
  std::vector<signal_forge::SceneRequest> requests;
  std::vector<int> truth;
  Rng rng(derive_seed(cfg.seed, 0xBA4CULL));
  for (std::size_t k = 0; k < signal_forge::kJammingKinds; ++k)
    for (std::size_t i = 0; i < per; ++i) {
      requests.push_back(signal_forge::sample_scene_request(cfg.dataset, signal_forge::JammingKind(k), rng));
      truth.push_back(int(k));
    }
  std::vector<tf_atlas::SceneImages> images(requests.size());
  parallel_for(requests.size(), [&](std::size_t i) {
    const auto scene = signal_forge::compose_scene(cfg.dataset.radar, requests[i], derive_seed(cfg.seed, 0x5CE0000ULL + i));
    images[i] = tf_atlas::make_scene_images(scene.composite, cfg.features);
  });
  std::vector<const tf_atlas::SceneImages*> ptrs;
  for (const auto& im : images) ptrs.push_back(&im);
  const auto predicted = fusion_net::predict_images(net, ptrs);
  ew_arena::RecognitionBank bank;
  for (std::size_t i = 0; i < predicted.size(); ++i) bank.predictions[std::size_t(truth[i])].push_back(predicted[i]);
  if (confusion) *confusion = metric_bench::ConfusionMatrix::from_predictions(truth, predicted);
  return bank;
}

AgentRun cmd_train_agent(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  ew_arena::EnvConfig env = cfg.env;
  env.recognition = {};
  log << "training agents with oracle labels, strategy " << ew_arena::to_string(env.strategy) << '\n';
  return run_agents(cfg, env, agent_dir(cfg), std::nullopt, log);
}

AgentRun cmd_closed_loop(const RunConfig& cfg, const fs::path& checkpoint, std::ostream& log) {
  cfg.validate();
  ew_arena::EnvConfig env = cfg.env;
  env.recognition = {};
  std::optional<metric_bench::ConfusionMatrix> recognition;
  if (!cfg.run.oracle_labels) {
    fusion_net::Recognizer net(cfg.recognizer, 0);
    fusion_net::load_checkpoint(checkpoint, net.params());
    metric_bench::ConfusionMatrix cm;
    env.recognition = build_recognition_bank(cfg, net, &cm);
    recognition = cm;
    log << "recognizer in the loop: OA " << fmt("%.4f", metric_bench::classification_metrics(cm).oa) << " on "
        << cm.total() << " synthesised scenes\n";
  } else {
    log << "oracle labels\n";
  }
  log << "strategy " << ew_arena::to_string(env.strategy) << '\n';
  return run_agents(cfg, env, closed_loop_dir(cfg), recognition, log);
}

void cmd_report(const RunConfig& cfg, const fs::path& run_dir, std::ostream& log) {
  metric_bench::ReportInputs in;
  for (const char* name : {"dqn", "sarsa"}) {
    const auto path = run_dir / ("reward_" + std::string(name) + ".csv");
    require(fs::exists(path), ErrorKind::io, "missing " + path.string());
    in.traces.push_back({name, metric_bench::read_reward_trace_csv(path)});
  }
  if (fs::exists(run_dir / "confusion.csv")) in.confusion = metric_bench::read_confusion_csv(run_dir / "confusion.csv");
  if (fs::exists(run_dir / "policy_trace.csv")) in.policy = metric_bench::read_policy_trace_csv(run_dir / "policy_trace.csv");
  in.n_actions = cfg.env.actions().size();
  in.window = cfg.report.window;
  in.theta = cfg.report.theta;
  in.max_episode_reward = cfg.env.max_episode_reward();
  in.stability_tail = cfg.report.stability_tail;
  const auto out = run_dir / "report";
  make_dir(out);
  metric_bench::assemble_report(in, out);
  log << "report written to " << out.string() << '\n';
  for (const auto& t : in.traces) log_trace(log, t.name.c_str(), t.trace, cfg);
}

}  // namespace jamlab::jamctl
