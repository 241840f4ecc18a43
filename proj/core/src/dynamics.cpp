#include "ablum/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ablum/errors.hpp"

namespace ablum {

double unit_benefit(double demand, double supply) {
  if (!(demand > 0.0)) {
    throw ConfigError("demand must be positive, got " + std::to_string(demand));
  }
  return std::max(0.0, (demand - supply) / demand);
}

double utility(const AgentFunctionalType& aft, const Cell& cell, const DemandState& demand) {
  const auto p = production(aft, cell);
  return unit_benefit(demand.d_mat, demand.s_mat) * p.material +
         unit_benefit(demand.d_nm, demand.s_nm) * p.non_material;
}

void validate(const StoppingRule& rule) {
  if (rule.window < 2) throw ConfigError("window must be >= 2");
  if (rule.max_ticks < rule.window) throw ConfigError("max_ticks must be >= window");
  if (!(rule.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
}

double AttitudeSchedule::at(int tick) const {
  if (breakpoints.empty()) return 0.0;
  if (tick <= breakpoints.front().tick) return breakpoints.front().mean_attitude;
  if (tick >= breakpoints.back().tick) return breakpoints.back().mean_attitude;
  const auto hi = std::upper_bound(
      breakpoints.begin(), breakpoints.end(), tick,
      [](int t, const Breakpoint& b) { return t < b.tick; });
  const auto lo = std::prev(hi);
  const double t = static_cast<double>(tick - lo->tick) / (hi->tick - lo->tick);
  return lo->mean_attitude + t * (hi->mean_attitude - lo->mean_attitude);
}

int AttitudeSchedule::end_tick() const {
  return breakpoints.empty() ? 0 : breakpoints.back().tick;
}

void validate(const AttitudeSchedule& schedule) {
  if (schedule.breakpoints.empty()) throw ConfigError("attitude schedule has no breakpoints");
  for (std::size_t i = 0; i < schedule.breakpoints.size(); ++i) {
    const auto& b = schedule.breakpoints[i];
    if (b.tick < 0) throw ConfigError("schedule ticks must be non-negative");
    if (b.mean_attitude < -1.0 || b.mean_attitude > 1.0) {
      throw ConfigError("schedule mean attitude " + std::to_string(b.mean_attitude) +
                        " out of range [-1, 1]");
    }
    if (i > 0 && b.tick <= schedule.breakpoints[i - 1].tick) {
      throw ConfigError("schedule ticks must be strictly increasing");
    }
  }
}

void refresh_supply(SimulationState& state) {
  double s_mat = 0.0;
  double s_nm = 0.0;
  for (const auto& c : state.grid.cells) {
    const auto p = production(state.afts[to_index(c.aft)], c);
    s_mat += p.material;
    s_nm += p.non_material;
  }
  state.demand.s_mat = s_mat;
  state.demand.s_nm = s_nm;
}

TrajectoryRow observe(const SimulationState& state) {
  TrajectoryRow row;
  row.tick = state.tick;
  std::array<std::size_t, kAftCount> counts{};
  double attitude_sum = 0.0;
  for (const auto& c : state.grid.cells) {
    ++counts[to_index(c.aft)];
    const auto p = production(state.afts[to_index(c.aft)], c);
    row.s_mat += p.material;
    row.s_nm += p.non_material;
    attitude_sum += c.profile.attitude;
  }
  const auto n = static_cast<double>(state.grid.size());
  for (std::size_t k = 0; k < kAftCount; ++k) row.shares[k] = counts[k] / n;
  row.mean_attitude = attitude_sum / n;
  return row;
}

std::optional<AftId> choose_competitor(const SimulationState& state,
                                       std::span<const double> intensities, CellIndex cell) {
  const Cell& c = state.grid.cells[cell];
  const auto& incumbent = state.afts[to_index(c.aft)];
  const double u_incumbent = utility(incumbent, c, state.demand);

  std::optional<AftId> best;
  double best_margin = 0.0;
  double best_jump = 0.0;
  for (const auto& candidate : state.afts) {
    if (candidate.id == incumbent.id) continue;
    const double surplus = utility(candidate, c, state.demand) - u_incumbent;
    // The threshold is never negative, so a non-positive surplus cannot win.
    if (!(surplus > 0.0)) continue;
    const double git = evaluate_transition(c.profile, state.globals, state.network, intensities,
                                           cell, incumbent.intensity, candidate.intensity);
    if (!(surplus > git)) continue;
    const double margin = surplus - git;
    const double jump = std::abs(candidate.intensity - incumbent.intensity);
    // Candidates are visited in ascending id, so equal margin and jump keep
    // the lower id.
    if (!best || margin > best_margin || (margin == best_margin && jump < best_jump)) {
      best = candidate.id;
      best_margin = margin;
      best_jump = jump;
    }
  }
  return best;
}

TickReport tick_cells(SimulationState& state, std::span<const CellIndex> selected) {
  refresh_supply(state);
  std::vector<double> intensities(state.grid.size());
  for (std::size_t i = 0; i < intensities.size(); ++i) {
    intensities[i] = state.afts[to_index(state.grid.cells[i].aft)].intensity;
  }

  std::vector<std::pair<CellIndex, AftId>> winners;
  for (const CellIndex cell : selected) {
    if (auto winner = choose_competitor(state, intensities, cell)) {
      winners.emplace_back(cell, *winner);
    }
  }
  for (const auto& [cell, aft] : winners) state.grid.cells[cell].aft = aft;
  ++state.tick;
  return {selected.size(), winners.size()};
}

TickReport tick(SimulationState& state) {
  const std::size_t n = state.grid.size();
  const auto count = std::min<std::size_t>(
      n, static_cast<std::size_t>(std::llround(state.selection_fraction * static_cast<double>(n))));

  // Partial Fisher-Yates over a fresh identity permutation.
  std::vector<CellIndex> order(n);
  std::iota(order.begin(), order.end(), CellIndex{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(state.rng)]);
  }
  return tick_cells(state, std::span<const CellIndex>(order.data(), count));
}

bool window_stable(const Trajectory& trajectory, int window, double epsilon) {
  if (window < 0 || trajectory.size() < static_cast<std::size_t>(window) + 1) return false;
  const auto first = trajectory.end() - (window + 1);
  for (std::size_t k = 0; k < kAftCount; ++k) {
    const auto [lo, hi] = std::minmax_element(
        first, trajectory.end(),
        [k](const TrajectoryRow& a, const TrajectoryRow& b) { return a.shares[k] < b.shares[k]; });
    if (!(hi->shares[k] - lo->shares[k] < epsilon)) return false;
  }
  return true;
}

RunResult run_until_stable(SimulationState& state, const StoppingRule& rule) {
  validate(rule);
  RunResult result;
  result.trajectory.push_back(observe(state));
  while (true) {
    if (window_stable(result.trajectory, rule.window, rule.epsilon)) {
      result.stabilised_at = state.tick;
      break;
    }
    if (state.tick >= rule.max_ticks) break;
    tick(state);
    result.trajectory.push_back(observe(state));
  }
  return result;
}

void apply_attitude_schedule(SimulationState& state, const AttitudeSchedule& schedule) {
  const double mean = schedule.at(state.tick);
  auto& cells = state.grid.cells;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double offset = i < state.attitude_offsets.size() ? state.attitude_offsets[i] : 0.0;
    cells[i].profile.attitude = std::clamp(mean + offset, -1.0, 1.0);
  }
}

RunResult run_with_schedule(SimulationState& state, const AttitudeSchedule& schedule,
                            const StoppingRule& rule) {
  validate(rule);
  validate(schedule);
  const int end = schedule.end_tick();
  const int max_ticks = std::max(rule.max_ticks, end);

  RunResult result;
  apply_attitude_schedule(state, schedule);
  result.trajectory.push_back(observe(state));
  while (true) {
    if (state.tick >= end && window_stable(result.trajectory, rule.window, rule.epsilon)) {
      result.stabilised_at = state.tick;
      break;
    }
    if (state.tick >= max_ticks) break;
    tick(state);
    apply_attitude_schedule(state, schedule);
    result.trajectory.push_back(observe(state));
  }
  return result;
}

}  // namespace ablum
