#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "ablum/config.hpp"
#include "ablum/dynamics.hpp"
#include "ablum/errors.hpp"
#include "ablum/experiment.hpp"
#include "ablum/metrics.hpp"

using namespace ablum;

namespace {

ExperimentConfig small_config(int size = 20) {
  ExperimentConfig c;
  c.width = c.height = size;
  return c;
}

std::vector<double> intensities(const SimulationState& s) {
  std::vector<double> v;
  for (const auto& c : s.grid.cells) v.push_back(s.afts[to_index(c.aft)].intensity);
  return v;
}

}  // namespace

TEST(UnitBenefit, Examples) {
  EXPECT_DOUBLE_EQ(unit_benefit(4000, 3000), 0.25);
  EXPECT_EQ(unit_benefit(4000, 4000), 0.0);
  EXPECT_EQ(unit_benefit(4000, 9000), 0.0);
  EXPECT_EQ(unit_benefit(4000, 0), 1.0);
  EXPECT_THROW(unit_benefit(0, 10), ConfigError);
}

TEST(Utility, Examples) {
  const auto afts = canonical_afts();
  Cell c;
  c.c_prod = 0.8;
  c.c_nat = 0.3;
  DemandState d{4000, 4000, 3000, 2000};
  EXPECT_NEAR(utility(afts[2], c, d), 0.20, 1e-12);
  EXPECT_NEAR(utility(afts[1], c, d), 0.175, 1e-12);
  d.s_mat = d.s_nm = 5000;
  for (const auto& a : afts) EXPECT_EQ(utility(a, c, d), 0.0);
}

TEST(Utility, WithinUnitInterval) {
  const auto afts = canonical_afts();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    Cell c;
    c.c_prod = u(rng);
    c.c_nat = u(rng);
    DemandState d{1000 + 4000 * u(rng), 1000 + 4000 * u(rng), 6000 * u(rng), 6000 * u(rng)};
    for (const auto& a : afts) {
      const double v = utility(a, c, d);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Schedule, Interpolation) {
  AttitudeSchedule s{{{0, -0.5}, {100, 0.5}}};
  EXPECT_DOUBLE_EQ(s.at(50), 0.0);
  EXPECT_DOUBLE_EQ(s.at(-3), -0.5);
  EXPECT_DOUBLE_EQ(s.at(500), 0.5);
  EXPECT_EQ(s.end_tick(), 100);
}

TEST(Schedule, SymmetricRamp) {
  AttitudeSchedule s{{{0, -1}, {200, 1}, {400, -1}}};
  for (int t = 0; t <= 400; ++t) EXPECT_NEAR(s.at(t), s.at(400 - t), 1e-12);
}

TEST(Schedule, ValidateRejects) {
  EXPECT_THROW(validate(AttitudeSchedule{{{0, 0}, {0, 1}}}), ConfigError);
  EXPECT_THROW(validate(AttitudeSchedule{{{0, 1.5}}}), ConfigError);
  EXPECT_THROW(validate(AttitudeSchedule{}), ConfigError);
}

TEST(Schedule, ConstantZeroWithoutOffsetsKeepsAttitudesZero) {
  auto cfg = small_config();
  cfg.spread.attitude = 0.0;
  auto state = build_state(cfg, 1);
  AttitudeSchedule flat{{{0, 0.0}}};
  for (int t = 0; t < 30; ++t) {
    apply_attitude_schedule(state, flat);
    for (const auto& c : state.grid.cells) ASSERT_EQ(c.profile.attitude, 0.0);
    tick(state);
  }
}

TEST(Schedule, OffsetsAreClamped) {
  auto cfg = small_config();
  cfg.spread.attitude = 0.5;
  auto state = build_state(cfg, 3);
  AttitudeSchedule top{{{0, 1.0}}};
  apply_attitude_schedule(state, top);
  for (std::size_t i = 0; i < state.grid.size(); ++i) {
    const double a = state.grid.cells[i].profile.attitude;
    EXPECT_LE(a, 1.0);
    EXPECT_GE(a, -1.0);
    EXPECT_DOUBLE_EQ(a, std::clamp(1.0 + state.attitude_offsets[i], -1.0, 1.0));
  }
}

TEST(Tick, SelectsFivePercentAndAdvances) {
  auto state = build_state(small_config(20), 2);
  const auto r = tick(state);
  EXPECT_EQ(r.selected, 20u);
  EXPECT_EQ(state.tick, 1);
}

TEST(Tick, SaturatedDemandFreezesEverything) {
  auto cfg = small_config();
  cfg.behaviour.norm_weight = 0.0;
  cfg.behaviour.attitude = 0.0;
  cfg.spread.attitude = 0.0;
  cfg.demand_mat = cfg.demand_nm = 1e-9;
  cfg.scale_to_reference = false;
  auto state = build_state(cfg, 4);
  const auto before = state.grid.cells;
  for (int t = 0; t < 20; ++t) EXPECT_EQ(tick(state).changed, 0u);
  for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(state.grid.cells[i].aft, before[i].aft);
  EXPECT_EQ(state.tick, 20);
}

TEST(Tick, SingleSelectedCellChangesAlone) {
  auto cfg = small_config(10);
  cfg.globals.behaviour_enabled = false;
  cfg.initial_shares = {1, 0, 0};
  auto state = build_state(cfg, 1);
  // Everything is Conservation, so material supply is zero and HI wins on a
  // productive cell.
  const auto it = std::max_element(state.grid.cells.begin(), state.grid.cells.end(),
                                   [](const Cell& a, const Cell& b) { return a.c_prod < b.c_prod; });
  const auto cell = static_cast<CellIndex>(it - state.grid.cells.begin());
  const std::vector<CellIndex> sel{cell};
  const auto r = tick_cells(state, sel);
  EXPECT_EQ(r.changed, 1u);
  for (std::size_t i = 0; i < state.grid.size(); ++i) {
    if (i != cell) EXPECT_EQ(state.grid.cells[i].aft, AftId::kConservation);
  }
  EXPECT_NE(state.grid.cells[cell].aft, AftId::kConservation);
}

TEST(Tick, ChangesOnlyWhenSurplusExceedsThreshold) {
  auto state = build_state(small_config(25), 9);
  for (int t = 0; t < 40; ++t) {
    refresh_supply(state);
    const auto snapshot = state;
    const auto in = intensities(snapshot);
    tick(state);
    for (std::size_t i = 0; i < state.grid.size(); ++i) {
      const auto from = snapshot.grid.cells[i].aft;
      const auto to = state.grid.cells[i].aft;
      if (from == to) continue;
      const auto& cell = snapshot.grid.cells[i];
      const double surplus = utility(snapshot.afts[to_index(to)], cell, snapshot.demand) -
                             utility(snapshot.afts[to_index(from)], cell, snapshot.demand);
      const double git = evaluate_transition(cell.profile, snapshot.globals, snapshot.network, in,
                                             static_cast<CellIndex>(i),
                                             snapshot.afts[to_index(from)].intensity,
                                             snapshot.afts[to_index(to)].intensity);
      EXPECT_GT(surplus, git);
      EXPECT_EQ(choose_competitor(snapshot, in, static_cast<CellIndex>(i)), to);
    }
  }
}

TEST(Tick, OrderIndependent) {
  auto a = build_state(small_config(25), 5);
  for (int t = 0; t < 10; ++t) tick(a);
  auto b = a;
  std::vector<CellIndex> sel(100);
  std::iota(sel.begin(), sel.end(), CellIndex{200});
  auto rev = sel;
  std::reverse(rev.begin(), rev.end());
  tick_cells(a, sel);
  tick_cells(b, rev);
  for (std::size_t i = 0; i < a.grid.size(); ++i) EXPECT_EQ(a.grid.cells[i].aft, b.grid.cells[i].aft);
}

TEST(Supply, BookkeepingEveryTick) {
  auto state = build_state(small_config(30), 6);
  for (int t = 0; t < 30; ++t) {
    tick(state);
    refresh_supply(state);
    const auto s = total_supply(state.grid, state.afts);
    double mat = 0, nm = 0;
    for (const auto& c : state.grid.cells) {
      const auto p = production(state.afts[to_index(c.aft)], c);
      mat += p.material;
      nm += p.non_material;
    }
    EXPECT_NEAR(state.demand.s_mat, mat, 1e-9);
    EXPECT_NEAR(state.demand.s_nm, nm, 1e-9);
    EXPECT_NEAR(s.material, mat, 1e-9);
  }
}

TEST(RunUntilStable, FixedPointStopsAtWindow) {
  auto cfg = small_config();
  cfg.demand_mat = cfg.demand_nm = 1e-9;
  cfg.scale_to_reference = false;
  cfg.behaviour.norm_weight = 0.0;
  cfg.spread.attitude = 0.0;
  auto state = build_state(cfg, 1);
  StoppingRule rule;
  const auto r = run_until_stable(state, rule);
  EXPECT_EQ(r.stabilised_at, rule.window);
  EXPECT_EQ(r.trajectory.size(), static_cast<std::size_t>(rule.window + 1));
}

TEST(RunUntilStable, VacuousEpsilon) {
  auto state = build_state(small_config(), 2);
  StoppingRule rule;
  rule.epsilon = 1.0;
  rule.window = 5;
  const auto r = run_until_stable(state, rule);
  EXPECT_EQ(r.stabilised_at, 5);
}

TEST(RunUntilStable, MaxTicksReported) {
  auto state = build_state(small_config(), 2);
  StoppingRule rule;
  rule.epsilon = 1e-12;
  rule.window = 5;
  rule.max_ticks = 7;
  const auto r = run_until_stable(state, rule);
  EXPECT_EQ(r.stabilised_at, -1);
  EXPECT_EQ(r.trajectory.back().tick, 7);
}

TEST(RunUntilStable, RuleValidation) {
  StoppingRule r;
  r.window = 1;
  EXPECT_THROW(validate(r), ConfigError);
  r.window = 50;
  r.max_ticks = 10;
  EXPECT_THROW(validate(r), ConfigError);
}

TEST(RunUntilStable, Reproducible) {
  auto a = build_state(small_config(30), 77);
  auto b = build_state(small_config(30), 77);
  const auto ra = run_until_stable(a, {});
  const auto rb = run_until_stable(b, {});
  ASSERT_EQ(ra.trajectory.size(), rb.trajectory.size());
  for (std::size_t i = 0; i < ra.trajectory.size(); ++i) {
    EXPECT_EQ(ra.trajectory[i].shares, rb.trajectory[i].shares);
    EXPECT_EQ(ra.trajectory[i].s_mat, rb.trajectory[i].s_mat);
  }
}

TEST(RunUntilStable, RegimePresetTerminates) {
  auto cfg = load_config(std::string(ABLUM_PRESET_DIR) + "/regimes.cfg");
  cfg.sweep.clear();
  int stopped = 0;
  for (int s = 0; s < 20; ++s) {
    const double a = -1.0 + 2.0 * (s % 5) / 4.0;
    cfg.behaviour.attitude = a;
    cfg.behaviour.norm_weight = (s / 5) / 3.0;
    cfg.width = cfg.height = 41;
    const auto o = simulate(cfg, static_cast<std::uint64_t>(s));
    stopped += o.result.stabilised_at >= 0;
  }
  EXPECT_GE(stopped, 19);
}

TEST(WindowStable, Basic) {
  Trajectory t(4);
  for (int i = 0; i < 4; ++i) t[static_cast<std::size_t>(i)].shares = {0.5, 0.25, 0.25};
  EXPECT_TRUE(window_stable(t, 3, 0.001));
  EXPECT_FALSE(window_stable(t, 4, 0.001));
  t[0].shares = {0.6, 0.15, 0.25};
  EXPECT_FALSE(window_stable(t, 3, 0.05));
  EXPECT_TRUE(window_stable(t, 2, 0.05));
}

TEST(RunWithSchedule, RunsWholeScheduleThenStabilises) {
  auto cfg = small_config();
  auto state = build_state(cfg, 1);
  AttitudeSchedule s{{{0, -1}, {60, 1}, {120, -1}}};
  StoppingRule rule;
  rule.window = 10;
  const auto r = run_with_schedule(state, s, rule);
  EXPECT_GE(r.trajectory.back().tick, 120);
  EXPECT_GT(r.trajectory[60].mean_attitude, r.trajectory[0].mean_attitude);
  EXPECT_DOUBLE_EQ(r.trajectory[120].mean_attitude, r.trajectory[0].mean_attitude);
}
