#pragma once

#include "jamlab/ew_arena/types.hpp"

namespace jamlab::ew_arena {

inline constexpr double kRewardEscape = 30.0;
inline constexpr double kRewardSuppressed = -100.0;

// P_s h_s^2 sigma / (P_n + P_j h_s I).
double sinr(const PowerBudget& pb, bool jam_active_on_radar_band);
double sinr_db(const PowerBudget& pb, bool jam_active_on_radar_band);

// Containment -> -100, disjoint -> 30, partial overlap -> SINR (dB, I = 1).
double reward_aj(const Band& signal, const Band& jam, const PowerBudget& pb);

// Hop of n >= 1 channels -> 30 - c max(n, b); stay -> SINR (dB, I = 1).
double reward_rftj(std::size_t prev_channel, std::size_t next_channel, const FreqGrid& grid, double c, double b,
                   const PowerBudget& pb);
// Raw-frequency form; a step that is not a whole number of channels
// returns -(n_channels - 1).
double reward_rftj_hz(double f_prev_hz, double f_next_hz, const FreqGrid& grid, double c, double b,
                      const PowerBudget& pb);

// t_cheat > t_observe -> 30; otherwise SINR (dB, I = 1).
double reward_rdftj(double t_cheat_s, double t_observe_s, const PowerBudget& pb);

}  // namespace jamlab::ew_arena
