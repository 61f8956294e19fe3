#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "jamlab/common/rng.hpp"
#include "jamlab/ew_arena/rewards.hpp"

namespace jamlab::ew_arena {

struct JammerConfig {
  double aj_bw_min_factor = 2.0;  // AJ bandwidth as a multiple of the radar bandwidth
  double aj_bw_max_factor = 4.0;
  double jnr_min_db = 10.0;
  double jnr_max_db = 35.0;
  std::size_t rdftj_min_targets = 3;
  std::size_t rdftj_max_targets = 5;
  double t_observe_s = 8e-6;
};

struct ObservationConfig {
  bool use_passive = true;
  double sigma_active_hz = 2e6;
  double sigma_passive_hz = 0.1e6;
};

// Recognizer outputs on pre-classified scenes, per true jammer type. A CPI
// draws one entry of the true type's list. Empty lists mean oracle labels.
struct RecognitionBank {
  std::array<std::vector<int>, 3> predictions;
  bool empty() const { return predictions[0].empty() && predictions[1].empty() && predictions[2].empty(); }
};

struct EnvConfig {
  FreqGrid grid;
  std::vector<double> cheat_durations_s{6e-6, 12e-6};
  double radar_bandwidth_hz = 28e6;
  PowerBudget power;  // p_j is replaced by P_n 10^(JNR/10) every CPI
  JammerConfig jammer;
  ObservationConfig observation;
  Strategy strategy = Strategy::fixed;
  JammerType initial_type = JammerType::AJ;
  std::size_t cpis_per_episode = 32;
  double rftj_cost_c = 1.0;
  double rftj_cost_floor_b = 2.0;
  RecognitionBank recognition;

  void validate() const;
  ActionSpace actions() const { return {grid.n_channels, cheat_durations_s}; }
  // Best possible per-step reward times the horizon, for the AJ scenario.
  double max_episode_reward() const { return kRewardEscape * double(cpis_per_episode); }
};

inline constexpr std::size_t kObservationDim = 8;

// Normalised state vector: one-hot recognised type, fused centre and
// bandwidth, active-only centre and bandwidth, last radar channel.
struct Observation {
  std::array<double, kObservationDim> v{};
  int recognized_type = 0;
  std::size_t jam_channel = 0;  // fused centre snapped to the grid
  std::size_t last_channel = 0;
};

struct ArenaState {
  JammerState jammer;
  JamPlan plan;
  std::size_t last_channel = 0;
  std::size_t cpi = 0;
  bool done = false;
  Observation obs;
  Rng rng;
};

struct StepInfo {
  std::size_t cpi = 0;
  JammerType jammer_type = JammerType::AJ;
  RadarAction action;
  std::size_t action_index = 0;
  double reward = 0.0;
  double sinr_db = 0.0;
};

struct StepResult {
  ArenaState next;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

// Type the jammer switches to at the next CPI boundary.
JammerType next_jammer_type(const JammerState& js, Rng& rng, int* next_dir = nullptr);

// Advances one CPI: switches type per strategy and locks onto the radar's
// last channel.
std::pair<JammerState, JamPlan> jammer_step(const JammerState& js, const RadarAction& radar_last, const EnvConfig& cfg,
                                            Rng& rng);

JamPlan make_plan(JammerType type, std::size_t radar_channel, const EnvConfig& cfg, Rng& rng);

Observation observe_fused(const JamPlan& truth, int recognized_type, std::size_t last_channel, const EnvConfig& cfg,
                          Rng& rng);

ArenaState env_reset(const EnvConfig& cfg, std::uint64_t seed);
// Pure: the result depends only on (cfg, state, action).
StepResult env_step(const EnvConfig& cfg, const ArenaState& state, std::size_t action_index);

// (recognised type x snapped jam channel x last channel).
std::size_t discrete_state(const Observation& obs, const EnvConfig& cfg);
std::size_t discrete_state_count(const EnvConfig& cfg);

struct EpisodeLogRow {
  std::size_t episode = 0;
  std::size_t step = 0;
  StepInfo info;
};

// Columns: episode,step,cpi,jammer_type,action_kind,channel,reward,sinr_db.
void write_episode_log(const std::filesystem::path& path, const std::vector<EpisodeLogRow>& rows);

}  // namespace jamlab::ew_arena
