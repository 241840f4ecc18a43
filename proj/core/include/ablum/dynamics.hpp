#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ablum/behaviour.hpp"
#include "ablum/landscape.hpp"
#include "ablum/network.hpp"
#include "ablum/rng.hpp"

namespace ablum {

struct DemandState {
  double d_mat = 4000.0;
  double d_nm = 4000.0;
  double s_mat = 0.0;
  double s_nm = 0.0;
};

// Residual-demand benefit max(0, (demand - supply) / demand).
// Throws ConfigError for non-positive demand.
double unit_benefit(double demand, double supply);

// b_mat * P_mat + b_nm * P_nm for `aft` farming `cell`.
double utility(const AgentFunctionalType& aft, const Cell& cell, const DemandState& demand);

struct StoppingRule {
  int max_ticks = 2000;
  int window = 50;
  double epsilon = 0.002;

  friend bool operator==(const StoppingRule&, const StoppingRule&) = default;
};

void validate(const StoppingRule& rule);

// Piecewise-linear mean attitude over ticks; held constant outside the
// breakpoint range.
struct AttitudeSchedule {
  struct Breakpoint {
    int tick = 0;
    double mean_attitude = 0.0;
    friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
  };
  std::vector<Breakpoint> breakpoints;

  double at(int tick) const;
  int end_tick() const;

  friend bool operator==(const AttitudeSchedule&, const AttitudeSchedule&) = default;
};

void validate(const AttitudeSchedule& schedule);

struct TrajectoryRow {
  int tick = 0;
  Shares shares{};
  double s_mat = 0.0;
  double s_nm = 0.0;
  double mean_attitude = 0.0;
};

using Trajectory = std::vector<TrajectoryRow>;

struct SimulationState {
  LandscapeGrid grid;
  SocialNetwork network;
  AftTable afts = canonical_afts();
  BehaviourGlobals globals;
  DemandState demand;
  // Fixed per-cell heterogeneity added to the scheduled mean attitude.
  std::vector<double> attitude_offsets;
  double selection_fraction = 0.05;
  int tick = 0;
  Rng rng;
};

// Recomputes s_mat and s_nm from the incumbent AFTs.
void refresh_supply(SimulationState& state);

// Current shares, supplies and mean attitude.
TrajectoryRow observe(const SimulationState& state);

// Best admissible competitor for `cell` against the given intensity snapshot
// and the supplies stored in `state`, or nullopt if none clears its threshold.
std::optional<AftId> choose_competitor(const SimulationState& state,
                                       std::span<const double> intensities, CellIndex cell);

struct TickReport {
  std::size_t selected = 0;
  std::size_t changed = 0;
};

// One synchronous competition step: refresh supplies, draw the selected cells
// without replacement, decide each against the start-of-tick snapshot, commit
// all winners together, advance the tick counter.
TickReport tick(SimulationState& state);

// Same decisions as tick() for an explicit set of selected cells, without
// drawing from the state's generator. Used to check order independence.
TickReport tick_cells(SimulationState& state, std::span<const CellIndex> selected);

// True when every share varies by less than epsilon across the trailing
// `window` ticks (window + 1 rows) of the trajectory.
bool window_stable(const Trajectory& trajectory, int window, double epsilon);

struct RunResult {
  Trajectory trajectory;
  // Tick at which the stopping rule was met, or -1 if max_ticks was reached.
  int stabilised_at = -1;
};

RunResult run_until_stable(SimulationState& state, const StoppingRule& rule);

// Sets every attitude to clamp(schedule(tick) + offset, -1, 1).
void apply_attitude_schedule(SimulationState& state, const AttitudeSchedule& schedule);

// Runs with the schedule applied before every tick. Stability is only checked
// once the schedule has finished.
RunResult run_with_schedule(SimulationState& state, const AttitudeSchedule& schedule,
                            const StoppingRule& rule);

}  // namespace ablum
