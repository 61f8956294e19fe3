#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "jamlab/signal_forge/types.hpp"

namespace jamlab::ew_arena {

using JammerType = signal_forge::JammingKind;

struct FreqGrid {
  std::size_t n_channels = 10;
  double base_hz = 865e6;
  double delta_f_hz = 30e6;

  void validate() const;
  double channel_hz(std::size_t k) const { return base_hz + double(k) * delta_f_hz; }
  // Nearest channel index, clamped to the grid.
  std::size_t nearest_channel(double f_hz) const;
};

struct RadarAction {
  enum class Kind { transmit, cover_pulse };
  Kind kind = Kind::transmit;
  std::size_t channel = 0;
  double t_cheat_s = 0.0;
};

// Index layout: [0, n) transmit on channel k; then one block of n per cover
// pulse duration, a cover pulse of that length followed by a hop to k.
struct ActionSpace {
  std::size_t n_channels = 10;
  std::vector<double> cheat_durations_s{6e-6, 12e-6};

  std::size_t size() const { return n_channels * (1 + cheat_durations_s.size()); }
  RadarAction decode(std::size_t index) const;
  std::size_t encode(const RadarAction& a) const;
};

struct PowerBudget {
  double p_s = 1.0;
  double p_j = 10.0;
  double p_n = 0.1;
  double h_s = 1.0;
  double sigma = 1.0;

  void validate() const;
};

struct Band {
  double lo = 0.0;
  double hi = 0.0;
};

enum class Strategy { fixed, I, II, III };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct JammerState {
  Strategy strategy = Strategy::fixed;
  JammerType current_type = JammerType::AJ;
  std::size_t cpi_counter = 0;
  int palindrome_dir = 1;
  std::size_t observed_radar_channel = 0;
  double t_observe_s = 8e-6;
};

// What the jammer does during one CPI.
struct JamPlan {
  JammerType type = JammerType::AJ;
  double center_hz = 0.0;
  double bandwidth_hz = 0.0;
  // Radar channel the jammer is locked onto.
  std::size_t locked_channel = 0;
  double jnr_db = 20.0;
  std::size_t false_targets = 1;
};

}  // namespace jamlab::ew_arena
