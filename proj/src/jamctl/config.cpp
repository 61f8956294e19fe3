#include "jamlab/jamctl/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include "jamlab/signal_forge/json_io.hpp"

namespace jamlab::jamctl {

namespace {

void reject_unknown(const Json& j, const char* section, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw Error(ErrorKind::config_parse, std::string("section '") + section + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw Error(ErrorKind::config_parse, std::string("unknown key '") + key + "' in '" + section + "'");
  }
}

const char* window_name(tf_atlas::WindowShape w) {
  return w == tf_atlas::WindowShape::hamming ? "hamming" : "rectangular";
}

tf_atlas::WindowShape window_from(const Json& j, const char* key, tf_atlas::WindowShape fallback) {
  std::string name = window_name(fallback);
  read_opt(j, key, name);
  if (name == "hamming") return tf_atlas::WindowShape::hamming;
  if (name == "rectangular") return tf_atlas::WindowShape::rectangular;
  throw Error(ErrorKind::config_parse, "unknown window shape '" + name + "'");
}

Json features_json(const tf_atlas::FeatureOptions& f) {
  return {{"side", f.side},
          {"stft_win", f.stft_win},
          {"stft_hop", f.stft_hop},
          {"stft_fft", f.stft_fft},
          {"spwvd",
           {{"h_len", f.spwvd.h_len},
            {"g_len", f.spwvd.g_len},
            {"decimation", f.spwvd.decimation},
            {"n_freq", f.spwvd.n_freq},
            {"h_shape", window_name(f.spwvd.h_shape)},
            {"g_shape", window_name(f.spwvd.g_shape)}}}};
}

void features_from(const Json& j, tf_atlas::FeatureOptions& f) {
  reject_unknown(j, "features", {"side", "stft_win", "stft_hop", "stft_fft", "spwvd"});
  read_opt(j, "side", f.side);
  read_opt(j, "stft_win", f.stft_win);
  read_opt(j, "stft_hop", f.stft_hop);
  read_opt(j, "stft_fft", f.stft_fft);
  if (!j.contains("spwvd")) return;
  const Json& s = j.at("spwvd");
  reject_unknown(s, "features.spwvd", {"h_len", "g_len", "decimation", "n_freq", "h_shape", "g_shape"});
  read_opt(s, "h_len", f.spwvd.h_len);
  read_opt(s, "g_len", f.spwvd.g_len);
  read_opt(s, "decimation", f.spwvd.decimation);
  read_opt(s, "n_freq", f.spwvd.n_freq);
  f.spwvd.h_shape = window_from(s, "h_shape", f.spwvd.h_shape);
  f.spwvd.g_shape = window_from(s, "g_shape", f.spwvd.g_shape);
}

Json recognizer_json(const fusion_net::RecognizerConfig& r) {
  return {{"image_side", r.image_side},
          {"stem_channels", r.stem_channels},
          {"tf_mid_channels", r.tf_mid_channels},
          {"tf_units", r.tf_units},
          {"time_channels", r.time_channels},
          {"time_res_blocks", r.time_res_blocks},
          {"model_width", r.model_width},
          {"token_pool", r.token_pool},
          {"attention_heads", r.attention_heads},
          {"head_dim", r.head_dim},
          {"classifier_hidden", r.classifier_hidden},
          {"time_stem_dropout", r.time_stem_dropout},
          {"residual_dropout", r.residual_dropout},
          {"classifier_dropout", r.classifier_dropout}};
}

void recognizer_from(const Json& j, fusion_net::RecognizerConfig& r) {
  reject_unknown(j, "recognizer",
                 {"image_side", "stem_channels", "tf_mid_channels", "tf_units", "time_channels", "time_res_blocks",
                  "model_width", "token_pool", "attention_heads", "head_dim", "classifier_hidden",
                  "time_stem_dropout", "residual_dropout", "classifier_dropout"});
  read_opt(j, "image_side", r.image_side);
  read_opt(j, "stem_channels", r.stem_channels);
  read_opt(j, "tf_mid_channels", r.tf_mid_channels);
  read_opt(j, "tf_units", r.tf_units);
  read_opt(j, "time_channels", r.time_channels);
  read_opt(j, "time_res_blocks", r.time_res_blocks);
  read_opt(j, "model_width", r.model_width);
  read_opt(j, "token_pool", r.token_pool);
  read_opt(j, "attention_heads", r.attention_heads);
  read_opt(j, "head_dim", r.head_dim);
  read_opt(j, "classifier_hidden", r.classifier_hidden);
  read_opt(j, "time_stem_dropout", r.time_stem_dropout);
  read_opt(j, "residual_dropout", r.residual_dropout);
  read_opt(j, "classifier_dropout", r.classifier_dropout);
}

Json training_json(const fusion_net::TrainConfig& t) {
  return {{"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"lr", t.lr},
          {"keep_best", t.keep_best},
          {"stop_at_val_oa", t.stop_at_val_oa}};
}

void training_from(const Json& j, fusion_net::TrainConfig& t) {
  reject_unknown(j, "training", {"epochs", "batch_size", "lr", "keep_best", "stop_at_val_oa"});
  read_opt(j, "epochs", t.epochs);
  read_opt(j, "batch_size", t.batch_size);
  read_opt(j, "lr", t.lr);
  read_opt(j, "keep_best", t.keep_best);
  read_opt(j, "stop_at_val_oa", t.stop_at_val_oa);
}

Json env_json(const ew_arena::EnvConfig& e) {
  return {{"n_channels", e.grid.n_channels},
          {"base_hz", e.grid.base_hz},
          {"delta_f_hz", e.grid.delta_f_hz},
          {"cheat_durations_s", e.cheat_durations_s},
          {"radar_bandwidth_hz", e.radar_bandwidth_hz},
          {"power", {{"p_s", e.power.p_s}, {"p_n", e.power.p_n}, {"h_s", e.power.h_s}, {"sigma", e.power.sigma}}},
          {"aj_bandwidth_factor", {e.jammer.aj_bw_min_factor, e.jammer.aj_bw_max_factor}},
          {"jnr_db", {e.jammer.jnr_min_db, e.jammer.jnr_max_db}},
          {"rdftj_targets", {e.jammer.rdftj_min_targets, e.jammer.rdftj_max_targets}},
          {"t_observe_s", e.jammer.t_observe_s},
          {"use_passive", e.observation.use_passive},
          {"sigma_active_hz", e.observation.sigma_active_hz},
          {"sigma_passive_hz", e.observation.sigma_passive_hz},
          {"strategy", ew_arena::to_string(e.strategy)},
          {"initial_type", signal_forge::to_string(e.initial_type)},
          {"cpis_per_episode", e.cpis_per_episode},
          {"rftj_cost_c", e.rftj_cost_c},
          {"rftj_cost_floor_b", e.rftj_cost_floor_b}};
}

template <typename T>
void read_pair(const Json& j, const char* key, T& lo, T& hi) {
  if (!j.contains(key)) return;
  const Json& v = j.at(key);
  if (!v.is_array() || v.size() != 2) throw Error(ErrorKind::config_parse, std::string(key) + " must be [lo, hi]");
  try {
    lo = v[0].get<T>();
    hi = v[1].get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config_parse, std::string("key '") + key + "': " + e.what());
  }
}

void env_from(const Json& j, ew_arena::EnvConfig& e) {
  reject_unknown(j, "env",
                 {"n_channels", "base_hz", "delta_f_hz", "cheat_durations_s", "radar_bandwidth_hz", "power",
                  "aj_bandwidth_factor", "jnr_db", "rdftj_targets", "t_observe_s", "use_passive", "sigma_active_hz",
                  "sigma_passive_hz", "strategy", "initial_type", "cpis_per_episode", "rftj_cost_c",
                  "rftj_cost_floor_b"});
  read_opt(j, "n_channels", e.grid.n_channels);
  read_opt(j, "base_hz", e.grid.base_hz);
  read_opt(j, "delta_f_hz", e.grid.delta_f_hz);
  read_opt(j, "cheat_durations_s", e.cheat_durations_s);
  read_opt(j, "radar_bandwidth_hz", e.radar_bandwidth_hz);
  if (j.contains("power")) {
    const Json& p = j.at("power");
    reject_unknown(p, "env.power", {"p_s", "p_n", "h_s", "sigma"});
    read_opt(p, "p_s", e.power.p_s);
    read_opt(p, "p_n", e.power.p_n);
    read_opt(p, "h_s", e.power.h_s);
    read_opt(p, "sigma", e.power.sigma);
  }
  read_pair(j, "aj_bandwidth_factor", e.jammer.aj_bw_min_factor, e.jammer.aj_bw_max_factor);
  read_pair(j, "jnr_db", e.jammer.jnr_min_db, e.jammer.jnr_max_db);
  read_pair(j, "rdftj_targets", e.jammer.rdftj_min_targets, e.jammer.rdftj_max_targets);
  read_opt(j, "t_observe_s", e.jammer.t_observe_s);
  read_opt(j, "use_passive", e.observation.use_passive);
  read_opt(j, "sigma_active_hz", e.observation.sigma_active_hz);
  read_opt(j, "sigma_passive_hz", e.observation.sigma_passive_hz);
  std::string name = ew_arena::to_string(e.strategy);
  read_opt(j, "strategy", name);
  try {
    e.strategy = ew_arena::strategy_from_string(name);
    name = signal_forge::to_string(e.initial_type);
    read_opt(j, "initial_type", name);
    e.initial_type = signal_forge::jamming_kind_from_string(name);
  } catch (const Error& err) {
    throw Error(ErrorKind::config_parse, err.what());
  }
  read_opt(j, "cpis_per_episode", e.cpis_per_episode);
  read_opt(j, "rftj_cost_c", e.rftj_cost_c);
  read_opt(j, "rftj_cost_floor_b", e.rftj_cost_floor_b);
}

Json agent_json(const q_forge::AgentConfig& a) {
  return {{"gamma", a.gamma},
          {"lr", a.lr},
          {"epsilon", {{"start", a.epsilon.start}, {"end", a.epsilon.end}, {"decay_episodes", a.epsilon.decay_episodes}}},
          {"batch_size", a.batch_size},
          {"target_sync_steps", a.target_sync_steps},
          {"buffer_capacity", a.buffer_capacity},
          {"hidden", a.hidden},
          {"sarsa_alpha", a.sarsa_alpha},
          {"sarsa_alpha_decay", a.sarsa_alpha_decay}};
}

void agent_from(const Json& j, q_forge::AgentConfig& a) {
  reject_unknown(j, "agent",
                 {"gamma", "lr", "epsilon", "batch_size", "target_sync_steps", "buffer_capacity", "hidden",
                  "sarsa_alpha", "sarsa_alpha_decay"});
  read_opt(j, "gamma", a.gamma);
  read_opt(j, "lr", a.lr);
  if (j.contains("epsilon")) {
    const Json& e = j.at("epsilon");
    reject_unknown(e, "agent.epsilon", {"start", "end", "decay_episodes"});
    read_opt(e, "start", a.epsilon.start);
    read_opt(e, "end", a.epsilon.end);
    read_opt(e, "decay_episodes", a.epsilon.decay_episodes);
  }
  read_opt(j, "batch_size", a.batch_size);
  read_opt(j, "target_sync_steps", a.target_sync_steps);
  read_opt(j, "buffer_capacity", a.buffer_capacity);
  read_opt(j, "hidden", a.hidden);
  read_opt(j, "sarsa_alpha", a.sarsa_alpha);
  read_opt(j, "sarsa_alpha_decay", a.sarsa_alpha_decay);
}

}  // namespace

void RunConfig::apply_seed(std::uint64_t s) {
  seed = s;
  dataset.seed = s;
  training.seed = s;
}

void RunConfig::validate() const {
  dataset.validate();
  recognizer.validate();
  require(features.side == recognizer.image_side, ErrorKind::invalid_config,
          "features.side must equal recognizer.image_side");
  require(training.epochs >= 1 && training.batch_size >= 1 && training.lr > 0.0, ErrorKind::invalid_config,
          "training needs epochs, batch size and a positive learning rate");
  env.validate();
  agent.validate();
  require(run.episodes >= 1 && run.bank_scenes_per_class >= 1, ErrorKind::invalid_config,
          "agent runs need episodes and recognition scenes");
  require(report.window >= 1 && report.theta > 0.0 && report.theta <= 1.0 && report.stability_tail >= 1,
          ErrorKind::invalid_config, "report window, theta or tail out of range");
  require(!out_dir.empty(), ErrorKind::invalid_config, "output directory required");
}

Json to_json(const RunConfig& c) {
  Json dataset = c.dataset;
  dataset.erase("seed");
  return {{"seed", c.seed},
          {"out_dir", c.out_dir.string()},
          {"dataset", dataset},
          {"features", features_json(c.features)},
          {"recognizer", recognizer_json(c.recognizer)},
          {"training", training_json(c.training)},
          {"env", env_json(c.env)},
          {"agent", agent_json(c.agent)},
          {"run",
           {{"episodes", c.run.episodes},
            {"bank_scenes_per_class", c.run.bank_scenes_per_class},
            {"oracle_labels", c.run.oracle_labels},
            {"policy_episodes", c.run.policy_episodes}}},
          {"report",
           {{"window", c.report.window}, {"theta", c.report.theta}, {"stability_tail", c.report.stability_tail}}}};
}

RunConfig run_config_from_json(const Json& j) {
  reject_unknown(j, "top level",
                 {"seed", "out_dir", "dataset", "features", "recognizer", "training", "env", "agent", "run", "report"});
  RunConfig c;
  try {
    if (j.contains("dataset")) {
      if (j.at("dataset").contains("seed"))
        throw Error(ErrorKind::config_parse, "dataset.seed is set from the top-level seed");
      c.dataset = j.at("dataset").get<signal_forge::DatasetConfig>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config_parse, std::string("dataset: ") + e.what());
  }
  if (j.contains("features")) features_from(j.at("features"), c.features);
  if (j.contains("recognizer")) recognizer_from(j.at("recognizer"), c.recognizer);
  if (j.contains("training")) training_from(j.at("training"), c.training);
  if (j.contains("env")) env_from(j.at("env"), c.env);
  if (j.contains("agent")) agent_from(j.at("agent"), c.agent);
  if (j.contains("run")) {
    const Json& r = j.at("run");
    reject_unknown(r, "run", {"episodes", "bank_scenes_per_class", "oracle_labels", "policy_episodes"});
    read_opt(r, "episodes", c.run.episodes);
    read_opt(r, "bank_scenes_per_class", c.run.bank_scenes_per_class);
    read_opt(r, "oracle_labels", c.run.oracle_labels);
    read_opt(r, "policy_episodes", c.run.policy_episodes);
  }
  if (j.contains("report")) {
    const Json& r = j.at("report");
    reject_unknown(r, "report", {"window", "theta", "stability_tail"});
    read_opt(r, "window", c.report.window);
    read_opt(r, "theta", c.report.theta);
    read_opt(r, "stability_tail", c.report.stability_tail);
  }
  std::string out = c.out_dir.string();
  read_opt(j, "out_dir", out);
  c.out_dir = out;
  std::uint64_t seed = c.seed;
  read_opt(j, "seed", seed);
  c.apply_seed(seed);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(bool(in), ErrorKind::io, "cannot open config " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config_parse, path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

void save_run_config(const std::filesystem::path& path, const RunConfig& c) {
  std::ofstream out(path, std::ios::trunc);
  require(bool(out), ErrorKind::io, "cannot write " + path.string());
  out << to_json(c).dump(2) << '\n';
  require(bool(out), ErrorKind::io, "write failed for " + path.string());
}

}  // namespace jamlab::jamctl
