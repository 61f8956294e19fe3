#include "jamlab/ew_arena/rewards.hpp"

#include <cmath>

#include "jamlab/common/error.hpp"
#include "jamlab/common/numeric.hpp"

namespace jamlab::ew_arena {

void FreqGrid::validate() const {
  require(n_channels >= 2, ErrorKind::invalid_config, "frequency grid needs at least two channels");
  require(delta_f_hz > 0.0 && std::isfinite(base_hz), ErrorKind::invalid_config, "channel spacing must be positive");
}

std::size_t FreqGrid::nearest_channel(double f_hz) const {
  const double k = std::round((f_hz - base_hz) / delta_f_hz);
  if (!(k > 0.0)) return 0;
  return std::min(n_channels - 1, std::size_t(k));
}

void PowerBudget::validate() const {
  for (double v : {p_s, p_j, p_n, h_s, sigma})
    require(std::isfinite(v) && v > 0.0, ErrorKind::invalid_params, "power budget terms must be positive");
}

double sinr(const PowerBudget& pb, bool jam_active_on_radar_band) {
  const double indicator = jam_active_on_radar_band ? 1.0 : 0.0;
  return pb.p_s * pb.h_s * pb.h_s * pb.sigma / (pb.p_n + pb.p_j * pb.h_s * indicator);
}

double sinr_db(const PowerBudget& pb, bool jam_active_on_radar_band) {
  return linear_to_db(sinr(pb, jam_active_on_radar_band));
}

double reward_aj(const Band& signal, const Band& jam, const PowerBudget& pb) {
  require(signal.lo < signal.hi && jam.lo < jam.hi, ErrorKind::invalid_params, "bands need lo < hi");
  if (jam.lo <= signal.lo && signal.hi <= jam.hi) return kRewardSuppressed;
  if (jam.hi <= signal.lo || signal.hi <= jam.lo) return kRewardEscape;
  return sinr_db(pb, true);
}

double reward_rftj(std::size_t prev_channel, std::size_t next_channel, const FreqGrid& grid, double c, double b,
                   const PowerBudget& pb) {
  require(prev_channel < grid.n_channels && next_channel < grid.n_channels, ErrorKind::invalid_action,
          "channel outside the grid");
  if (prev_channel == next_channel) return sinr_db(pb, true);
  const double n = double(prev_channel > next_channel ? prev_channel - next_channel : next_channel - prev_channel);
  return kRewardEscape - c * std::max(n, b);
}

double reward_rftj_hz(double f_prev_hz, double f_next_hz, const FreqGrid& grid, double c, double b,
                      const PowerBudget& pb) {
  const double steps = (f_next_hz - f_prev_hz) / grid.delta_f_hz;
  const double whole = std::round(steps);
  const auto on_grid = [&](double f) {
    const double k = (f - grid.base_hz) / grid.delta_f_hz;
    return std::abs(k - std::round(k)) < 1e-9 && std::round(k) >= 0.0 && std::round(k) < double(grid.n_channels);
  };
  if (std::abs(steps - whole) > 1e-9 || !on_grid(f_prev_hz) || !on_grid(f_next_hz))
    return -double(grid.n_channels - 1);
  return reward_rftj(grid.nearest_channel(f_prev_hz), grid.nearest_channel(f_next_hz), grid, c, b, pb);
}

double reward_rdftj(double t_cheat_s, double t_observe_s, const PowerBudget& pb) {
  require(t_cheat_s >= 0.0 && t_observe_s >= 0.0, ErrorKind::invalid_params, "times must be nonnegative");
  if (t_cheat_s > t_observe_s) return kRewardEscape;
  return sinr_db(pb, true);
}

}  // namespace jamlab::ew_arena
