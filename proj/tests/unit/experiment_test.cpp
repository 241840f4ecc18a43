#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "ablum/config.hpp"
#include "ablum/csv.hpp"
#include "ablum/errors.hpp"
#include "ablum/experiment.hpp"

using namespace ablum;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ablum_test_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

ExperimentConfig small(const char* name = "t") {
  ExperimentConfig c;
  c.name = name;
  c.width = c.height = 15;
  return c;
}

}  // namespace

TEST(Experiment, ReplicateSeedsAndRunId) {
  EXPECT_EQ(replicate_seed(10, 0), 10u);
  EXPECT_EQ(replicate_seed(10, 3), 13u);
  EXPECT_EQ(run_id(small("abc"), 7), "abc-s7");
}

TEST(Experiment, ExtensiveScale) {
  auto c = small();
  EXPECT_DOUBLE_EQ(extensive_scale(c), 225.0 / 10201.0);
  c.scale_to_reference = false;
  EXPECT_EQ(extensive_scale(c), 1.0);
}

TEST(Experiment, BuildStateIsDeterministicAndInRange) {
  auto c = small();
  c.spread.norm_weight = 0.3;
  const auto a = build_state(c, 4);
  const auto b = build_state(c, 4);
  ASSERT_EQ(a.grid.size(), 225u);
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    EXPECT_EQ(a.grid.cells[i].aft, b.grid.cells[i].aft);
    EXPECT_EQ(a.grid.cells[i].profile, b.grid.cells[i].profile);
    EXPECT_NO_THROW(validate(a.grid.cells[i].profile));
  }
  EXPECT_EQ(a.network, b.network);
  EXPECT_DOUBLE_EQ(a.demand.d_mat, 4000.0 * 225.0 / 10201.0);
}

TEST(Experiment, AddingReplicatesKeepsEarlierOnes) {
  auto c = small();
  c.replications = 1;
  const auto one = simulate(c, replicate_seed(c.seed, 0));
  c.replications = 5;
  const auto again = simulate(c, replicate_seed(c.seed, 0));
  EXPECT_EQ(one.final_shares, again.final_shares);
}

TEST(Experiment, ParallelForCoversAllAndRethrows) {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw UsageError("boom");
                            }),
               UsageError);
}

TEST_F(TempDir, RunSingleWritesThreeFiles) {
  auto c = small("single");
  c.replications = 2;
  const auto dirs = run_single(c, dir_, 2);
  ASSERT_EQ(dirs.size(), 2u);
  EXPECT_EQ(dirs[1].filename(), "single-s2");
  const auto traj = slurp(dirs[0] / "trajectory.csv");
  const auto metrics = slurp(dirs[0] / "metrics.csv");
  const auto map = slurp(dirs[0] / "map.csv");
  EXPECT_EQ(traj.substr(0, traj.find('\n')), "tick,share_c,share_mi,share_hi,s_mat,s_nm,mean_attitude");
  EXPECT_EQ(metrics.substr(0, metrics.find('\n')),
            "run_id,seed,final_share_c,final_share_mi,final_share_hi,s_mat,s_nm,mesh,stabilised_at");
  EXPECT_EQ(map.substr(0, map.find('\n')), "x,y,aft_id");
  EXPECT_EQ(lines(map), 226u);

  std::istringstream m(metrics);
  const auto rows = csv::read(m, "run_id,seed,final_share_c,final_share_mi,final_share_hi,s_mat,s_nm,mesh,stabilised_at");
  ASSERT_EQ(rows.size(), 1u);
  const auto stab = csv::to_integer(rows[0][8]);
  ASSERT_GE(stab, 0);
  EXPECT_EQ(lines(traj), static_cast<std::size_t>(stab) + 2);
  // Six-decimal fixed point everywhere.
  EXPECT_NE(metrics.find(",0."), std::string::npos);
  std::istringstream t(traj);
  std::string line;
  std::getline(t, line);
  std::getline(t, line);
  for (const auto& f : csv::split(line)) {
    if (f.find('.') != std::string::npos) EXPECT_EQ(f.size() - f.find('.') - 1, 6u) << f;
  }
}

TEST_F(TempDir, RunSingleIsByteIdentical) {
  auto c = small("same");
  const auto a = run_single(c, dir_ / "a", 1);
  const auto b = run_single(c, dir_ / "b", 3);
  for (const char* f : {"trajectory.csv", "metrics.csv", "map.csv"}) {
    EXPECT_EQ(slurp(a[0] / f), slurp(b[0] / f)) << f;
  }
}

TEST_F(TempDir, UnwritableOutputThrows) {
  fs::create_directories(dir_);
  std::ofstream(dir_ / "blocker") << "x";
  EXPECT_THROW(run_single(small(), dir_ / "blocker" / "sub", 1), IoError);
}

TEST_F(TempDir, SweepCountsAndOrder) {
  auto c = small("sw");
  c.replications = 3;
  c.sweep = {parse_sweep_axis("attitude_mean:-1:1:5"), parse_sweep_axis("norm_weight_w:0:1:5")};
  const auto rows = evaluate_sweep(c, 2);
  ASSERT_EQ(rows.size(), 75u);
  EXPECT_EQ(rows[0].values, (std::vector<double>{-1, 0}));
  EXPECT_EQ(rows[3].values, (std::vector<double>{-1, 0.25}));
  EXPECT_EQ(rows[3].point, 1u);
  EXPECT_EQ(rows[4].replicate, 1);
  const auto path = run_sweep(c, dir_, 2);
  const auto text = slurp(path);
  EXPECT_EQ(lines(text), 76u);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "point,rep,seed,attitude_mean,norm_weight_w,final_share_c,final_share_mi,"
            "final_share_hi,s_mat,s_nm,mesh,stabilised_at");
  EXPECT_EQ(slurp(path), slurp(run_sweep(c, dir_ / "again", 1)));
}

TEST_F(TempDir, OnePointSweepMatchesRun) {
  auto c = small("one");
  c.sweep = {parse_sweep_axis("cm_int:0.4:0.4:1")};
  c.behaviour.cm_int = 0.4;
  const auto rows = evaluate_sweep(c, 1);
  ASSERT_EQ(rows.size(), 1u);
  const auto single = simulate(c, c.seed);
  EXPECT_EQ(rows[0].outcome.final_shares, single.final_shares);
  EXPECT_EQ(rows[0].outcome.mesh, single.mesh);
  EXPECT_EQ(rows[0].outcome.result.stabilised_at, single.result.stabilised_at);
  c.sweep.clear();
  EXPECT_THROW(evaluate_sweep(c, 1), UsageError);
}

TEST_F(TempDir, CriticalMassPresetSweepRuns) {
  auto c = load_config(fs::path(ABLUM_PRESET_DIR) / "critical_mass.cfg");
  c.width = c.height = 21;
  c.replications = 1;
  const auto rows = evaluate_sweep(c, 2);
  EXPECT_EQ(rows.size(), c.sweep[0].values().size());
}

TEST_F(TempDir, HysteresisFlatScheduleMatchesRun) {
  auto c = small("flat");
  c.behaviour.attitude = 0.2;
  EXPECT_THROW(run_hysteresis(c, dir_, 1), UsageError);
  const auto plain = simulate(c, 1);
  c.schedule = AttitudeSchedule{{{0, 0.2}}};
  const auto scheduled = simulate(c, 1);
  ASSERT_EQ(plain.result.trajectory.size(), scheduled.result.trajectory.size());
  EXPECT_EQ(plain.final_shares, scheduled.final_shares);

  const auto dirs = run_hysteresis(c, dir_, 1);
  const auto text = slurp(dirs[0] / "hysteresis.csv");
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "tick,share_c,share_mi,share_hi,s_mat,s_nm,mean_attitude,schedule_attitude");
  std::istringstream in(text);
  const auto rows = csv::read(in, "tick,share_c,share_mi,share_hi,s_mat,s_nm,mean_attitude,schedule_attitude");
  for (const auto& r : rows) EXPECT_EQ(r[7], "0.200000");
}

TEST(Experiment, ReversedScheduleMirrorsAttitudeColumn) {
  AttitudeSchedule fwd{{{0, -1}, {40, 1}, {80, 0}}};
  AttitudeSchedule rev{{{0, 0}, {40, 1}, {80, -1}}};
  Trajectory t(81);
  for (int i = 0; i <= 80; ++i) t[static_cast<std::size_t>(i)].tick = i;
  std::ostringstream a, b;
  write_hysteresis_csv(a, t, fwd);
  write_hysteresis_csv(b, t, rev);
  std::istringstream ia(a.str()), ib(b.str());
  const auto header = "tick,share_c,share_mi,share_hi,s_mat,s_nm,mean_attitude,schedule_attitude";
  const auto ra = csv::read(ia, header);
  const auto rb = csv::read(ib, header);
  for (std::size_t i = 0; i <= 80; ++i) EXPECT_EQ(ra[i][7], rb[80 - i][7]);
}

TEST_F(TempDir, SobolCampaignWritesFiles) {
  auto c = small("sa");
  c.width = c.height = 11;
  SobolRequest req;
  req.n_base = 8;
  req.second_order = true;
  req.bootstrap_resamples = 10;
  const auto dir = run_sobol(c, req, dir_, 2);
  const auto design = slurp(dir / "design.csv");
  EXPECT_EQ(lines(design), 8u * 20u + 1u);
  EXPECT_EQ(design.substr(0, design.find('\n')),
            "row,attitude_mean,norm_weight_w,inertia_lambda,cm_int,cm_ext,demand_mat,demand_nm,"
            "moore_radius,n_tele");
  EXPECT_EQ(lines(slurp(dir / "outputs.csv")), 161u);
  const auto json = slurp(dir / "indices.json");
  for (const char* k : {"\"share_c\"", "\"s_nm\"", "\"S1\"", "\"ST\"", "\"S2\"", "\"conf\""}) {
    EXPECT_NE(json.find(k), std::string::npos) << k;
  }
  EXPECT_EQ(slurp(dir / "indices.json"), slurp(run_sobol(c, req, dir_ / "again", 1) / "indices.json"));
}
