#include "jamlab/ew_arena/arena.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "jamlab/common/error.hpp"
#include "jamlab/common/numeric.hpp"

namespace jamlab::ew_arena {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::fixed: return "fixed";
    case Strategy::I: return "I";
    case Strategy::II: return "II";
    case Strategy::III: return "III";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "fixed") return Strategy::fixed;
  if (name == "I") return Strategy::I;
  if (name == "II") return Strategy::II;
  if (name == "III") return Strategy::III;
  throw Error(ErrorKind::invalid_config, "unknown strategy '" + name + "'");
}

RadarAction ActionSpace::decode(std::size_t index) const {
  require(index < size(), ErrorKind::invalid_action, "action index " + std::to_string(index) + " out of range");
  RadarAction a;
  a.channel = index % n_channels;
  const std::size_t block = index / n_channels;
  if (block > 0) {
    a.kind = RadarAction::Kind::cover_pulse;
    a.t_cheat_s = cheat_durations_s[block - 1];
  }
  return a;
}

std::size_t ActionSpace::encode(const RadarAction& a) const {
  require(a.channel < n_channels, ErrorKind::invalid_action, "channel outside the grid");
  if (a.kind == RadarAction::Kind::transmit) return a.channel;
  for (std::size_t k = 0; k < cheat_durations_s.size(); ++k)
    if (cheat_durations_s[k] == a.t_cheat_s) return (k + 1) * n_channels + a.channel;
  throw Error(ErrorKind::invalid_action, "cover pulse duration not in the action space");
}

void EnvConfig::validate() const {
  grid.validate();
  require(radar_bandwidth_hz > 0.0 && radar_bandwidth_hz <= grid.delta_f_hz, ErrorKind::invalid_config,
          "radar bandwidth must be positive and fit within one channel spacing");
  require(jammer.aj_bw_min_factor > 0.0 && jammer.aj_bw_min_factor <= jammer.aj_bw_max_factor,
          ErrorKind::invalid_config, "AJ bandwidth factors must satisfy 0 < min <= max");
  require(jammer.jnr_min_db <= jammer.jnr_max_db, ErrorKind::invalid_config, "JNR range reversed");
  require(jammer.rdftj_min_targets >= 1 && jammer.rdftj_min_targets <= jammer.rdftj_max_targets,
          ErrorKind::invalid_config, "RDFTJ target count range invalid");
  require(jammer.t_observe_s >= 0.0, ErrorKind::invalid_config, "t_observe must be nonnegative");
  for (double t : cheat_durations_s) require(t > 0.0, ErrorKind::invalid_config, "cover pulse durations must be positive");
  require(observation.sigma_active_hz >= 0.0 && observation.sigma_passive_hz >= 0.0, ErrorKind::invalid_config,
          "measurement noise must be nonnegative");
  require(cpis_per_episode >= 1, ErrorKind::invalid_config, "episode needs at least one CPI");
  require(rftj_cost_c >= 0.0 && rftj_cost_floor_b >= 0.0, ErrorKind::invalid_config, "hop costs must be nonnegative");
  power.validate();
  for (const auto& list : recognition.predictions)
    for (int p : list) require(p >= 0 && p < 3, ErrorKind::invalid_config, "recognition bank label out of range");
  require(recognition.empty() || (!recognition.predictions[0].empty() && !recognition.predictions[1].empty() &&
                                  !recognition.predictions[2].empty()),
          ErrorKind::invalid_config, "recognition bank needs entries for every jammer type");
}

JammerType next_jammer_type(const JammerState& js, Rng& rng, int* next_dir) {
  const int t = int(js.current_type);
  int dir = js.palindrome_dir;
  JammerType out = js.current_type;
  switch (js.strategy) {
    case Strategy::fixed: break;
    case Strategy::I: out = JammerType((t + 1) % 3); break;
    case Strategy::II:
      if (t == 2 && dir > 0) dir = -1;
      if (t == 0 && dir < 0) dir = 1;
      out = JammerType(t + dir);
      break;
    case Strategy::III: out = JammerType((t + 1 + int(uniform_index(rng, 2))) % 3); break;
  }
  if (next_dir) *next_dir = dir;
  return out;
}

JamPlan make_plan(JammerType type, std::size_t radar_channel, const EnvConfig& cfg, Rng& rng) {
  JamPlan plan;
  plan.type = type;
  plan.locked_channel = radar_channel;
  plan.center_hz = cfg.grid.channel_hz(radar_channel);
  plan.bandwidth_hz = cfg.radar_bandwidth_hz;
  plan.jnr_db = uniform(rng, cfg.jammer.jnr_min_db, cfg.jammer.jnr_max_db);
  switch (type) {
    case JammerType::AJ:
      plan.bandwidth_hz = cfg.radar_bandwidth_hz * uniform(rng, cfg.jammer.aj_bw_min_factor, cfg.jammer.aj_bw_max_factor);
      plan.false_targets = 0;
      break;
    case JammerType::RFTJ: plan.false_targets = 1; break;
    case JammerType::RDFTJ:
      plan.false_targets = cfg.jammer.rdftj_min_targets +
                           uniform_index(rng, cfg.jammer.rdftj_max_targets - cfg.jammer.rdftj_min_targets + 1);
      break;
  }
  return plan;
}

std::pair<JammerState, JamPlan> jammer_step(const JammerState& js, const RadarAction& radar_last, const EnvConfig& cfg,
                                            Rng& rng) {
  JammerState next = js;
  next.current_type = next_jammer_type(js, rng, &next.palindrome_dir);
  ++next.cpi_counter;
  next.observed_radar_channel = radar_last.channel;
  return {next, make_plan(next.current_type, radar_last.channel, cfg, rng)};
}

namespace {

double norm_center(double f_hz, const EnvConfig& cfg) {
  const double lo = cfg.grid.base_hz - cfg.grid.delta_f_hz / 2.0;
  return std::clamp((f_hz - lo) / (double(cfg.grid.n_channels) * cfg.grid.delta_f_hz), 0.0, 1.0);
}

double norm_bandwidth(double bw_hz, const EnvConfig& cfg) {
  return std::clamp(bw_hz / (cfg.jammer.aj_bw_max_factor * cfg.radar_bandwidth_hz), 0.0, 1.0);
}

int recognize(JammerType truth, const EnvConfig& cfg, Rng& rng) {
  if (cfg.recognition.empty()) return int(truth);
  const auto& list = cfg.recognition.predictions[std::size_t(truth)];
  return list[uniform_index(rng, list.size())];
}

PowerBudget budget_for(const JamPlan& plan, const EnvConfig& cfg) {
  PowerBudget pb = cfg.power;
  pb.p_j = pb.p_n * db_to_linear(plan.jnr_db);
  return pb;
}

}  // namespace

Observation observe_fused(const JamPlan& truth, int recognized_type, std::size_t last_channel, const EnvConfig& cfg,
                          Rng& rng) {
  Observation o;
  o.recognized_type = recognized_type;
  o.last_channel = last_channel;
  const auto& oc = cfg.observation;
  const double active_center = truth.center_hz + gaussian(rng, oc.sigma_active_hz);
  const double active_bw = truth.bandwidth_hz + gaussian(rng, oc.sigma_active_hz);
  double fused_center = active_center, fused_bw = active_bw;
  if (oc.use_passive) {
    fused_center = truth.center_hz + gaussian(rng, oc.sigma_passive_hz);
    fused_bw = truth.bandwidth_hz + gaussian(rng, oc.sigma_passive_hz);
  }
  o.v[std::size_t(recognized_type)] = 1.0;
  o.v[3] = norm_center(fused_center, cfg);
  o.v[4] = norm_bandwidth(fused_bw, cfg);
  o.v[5] = norm_center(active_center, cfg);
  o.v[6] = norm_bandwidth(active_bw, cfg);
  o.v[7] = double(last_channel) / double(cfg.grid.n_channels - 1);
  o.jam_channel = cfg.grid.nearest_channel(fused_center);
  return o;
}

ArenaState env_reset(const EnvConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ArenaState s;
  s.rng.seed(seed);
  s.last_channel = uniform_index(s.rng, cfg.grid.n_channels);
  s.jammer.strategy = cfg.strategy;
  s.jammer.current_type = cfg.initial_type;
  s.jammer.t_observe_s = cfg.jammer.t_observe_s;
  s.jammer.observed_radar_channel = s.last_channel;
  s.plan = make_plan(s.jammer.current_type, s.last_channel, cfg, s.rng);
  s.obs = observe_fused(s.plan, recognize(s.plan.type, cfg, s.rng), s.last_channel, cfg, s.rng);
  return s;
}

StepResult env_step(const EnvConfig& cfg, const ArenaState& state, std::size_t action_index) {
  require(!state.done, ErrorKind::invalid_action, "episode already finished");
  const RadarAction action = cfg.actions().decode(action_index);
  const PowerBudget pb = budget_for(state.plan, cfg);
  const std::size_t k = action.channel;

  double reward = 0.0;
  bool jammed = true;
  switch (state.plan.type) {
    case JammerType::AJ: {
      const double f = cfg.grid.channel_hz(k);
      const Band signal{f - cfg.radar_bandwidth_hz / 2.0, f + cfg.radar_bandwidth_hz / 2.0};
      const Band jam{state.plan.center_hz - state.plan.bandwidth_hz / 2.0,
                     state.plan.center_hz + state.plan.bandwidth_hz / 2.0};
      reward = reward_aj(signal, jam, pb);
      jammed = !(jam.hi <= signal.lo || signal.hi <= jam.lo);
      break;
    }
    case JammerType::RFTJ:
      reward = reward_rftj(state.plan.locked_channel, k, cfg.grid, cfg.rftj_cost_c, cfg.rftj_cost_floor_b, pb);
      jammed = k == state.plan.locked_channel;
      break;
    case JammerType::RDFTJ: {
      const bool cover_and_hop = action.kind == RadarAction::Kind::cover_pulse && k != state.plan.locked_channel;
      reward = reward_rdftj(cover_and_hop ? action.t_cheat_s : 0.0, state.jammer.t_observe_s, pb);
      jammed = reward != kRewardEscape;
      break;
    }
  }

  StepResult r;
  r.reward = reward;
  r.info = {state.cpi, state.plan.type, action, action_index, reward, sinr_db(pb, jammed)};
  ArenaState& next = r.next;
  next = state;
  auto [js, plan] = jammer_step(state.jammer, action, cfg, next.rng);
  next.jammer = js;
  next.plan = plan;
  next.last_channel = k;
  next.cpi = state.cpi + 1;
  next.done = next.cpi >= cfg.cpis_per_episode;
  next.obs = observe_fused(next.plan, recognize(next.plan.type, cfg, next.rng), k, cfg, next.rng);
  r.done = next.done;
  return r;
}

std::size_t discrete_state(const Observation& obs, const EnvConfig& cfg) {
  const std::size_t n = cfg.grid.n_channels;
  return (std::size_t(obs.recognized_type) * n + obs.jam_channel) * n + obs.last_channel;
}

std::size_t discrete_state_count(const EnvConfig& cfg) { return 3 * cfg.grid.n_channels * cfg.grid.n_channels; }

void write_episode_log(const std::filesystem::path& path, const std::vector<EpisodeLogRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  require(bool(out), ErrorKind::io, "cannot write " + path.string());
  out << "episode,step,cpi,jammer_type,action_kind,channel,reward,sinr_db\n";
  char line[160];
  for (const auto& r : rows) {
    const char* kind = r.info.action.kind == RadarAction::Kind::transmit ? "transmit" : "cover";
    std::snprintf(line, sizeof(line), "%zu,%zu,%zu,%s,%s,%zu,%.10g,%.10g\n", r.episode, r.step, r.info.cpi,
                  signal_forge::to_string(r.info.jammer_type), kind, r.info.action.channel, r.info.reward,
                  r.info.sinr_db);
    out << line;
  }
  require(bool(out), ErrorKind::io, "write failed for " + path.string());
}

}  // namespace jamlab::ew_arena
