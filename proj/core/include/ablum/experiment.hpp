#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ablum/config.hpp"
#include "ablum/dynamics.hpp"
#include "ablum/landscape.hpp"
#include "ablum/metrics.hpp"
#include "ablum/sensitivity.hpp"

namespace ablum {

// Factor applied to demands and teleconnection counts: cells / reference_cells
// when scale_to_reference is set, otherwise 1.
double extensive_scale(const ExperimentConfig& config);

CapitalFields build_capitals(const ExperimentConfig& config);

// Fully initialised simulation for one replicate seed: capitals, per-cell
// profiles, initial land use, social network, demands and generator.
SimulationState build_state(const ExperimentConfig& config, std::uint64_t seed);

std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate);
std::string run_id(const ExperimentConfig& config, std::uint64_t seed);

struct RunOutcome {
  std::uint64_t seed = 0;
  RunResult result;
  LandscapeGrid final_grid;
  Shares final_shares{};
  double s_mat = 0.0;
  double s_nm = 0.0;
  double mesh = 0.0;
};

// One replicate. Runs the attitude schedule when the config has one.
RunOutcome simulate(const ExperimentConfig& config, std::uint64_t seed);

// Calls fn(i) for i in [0, count) on up to `threads` workers. The first
// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

// CSV writers. Reals are fixed-point with six decimals.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
void write_hysteresis_csv(std::ostream& out, const Trajectory& trajectory,
                          const AttitudeSchedule& schedule);
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const std::string& id, const RunOutcome& outcome);

// run: <out>/<run_id>/{trajectory,metrics,map}.csv for every replicate.
// Returns the run directories.
std::vector<std::filesystem::path> run_single(const ExperimentConfig& config,
                                              const std::filesystem::path& out_dir,
                                              int threads = 1);

struct SweepRow {
  std::size_t point = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  std::vector<double> values;
  RunOutcome outcome;
};

// Full factorial over the config's sweep axes times replications, in point
// order then replicate order. Final grids and trajectories are dropped.
std::vector<SweepRow> evaluate_sweep(const ExperimentConfig& config, int threads = 1);
void write_sweep_csv(std::ostream& out, const ExperimentConfig& config,
                     const std::vector<SweepRow>& rows);

// sweep: <out>/<name>/sweep.csv. Returns the CSV path.
std::filesystem::path run_sweep(const ExperimentConfig& config,
                                const std::filesystem::path& out_dir, int threads = 1);

// hysteresis: <out>/<run_id>/{hysteresis,metrics,map}.csv for every
// replicate. Throws UsageError when the config has no schedule.
std::vector<std::filesystem::path> run_hysteresis(const ExperimentConfig& config,
                                                  const std::filesystem::path& out_dir,
                                                  int threads = 1);

inline constexpr std::array<const char*, 5> kSobolMetrics{"share_c", "share_mi", "share_hi",
                                                          "s_mat", "s_nm"};
using SobolOutputs = std::array<double, kSobolMetrics.size()>;

// Model outputs for every design row, averaged over the config's
// replications. Replicate seeds are shared by all rows.
std::vector<SobolOutputs> evaluate_design(const ExperimentConfig& base,
                                          const ParameterSpace& space,
                                          const DesignMatrix& design, int threads = 1);

// Indices per metric; nullopt where the metric's output variance is zero.
std::map<std::string, std::optional<SobolIndices>> analyse_design(
    const DesignMatrix& design, const std::vector<SobolOutputs>& outputs,
    const SobolOptions& options);

void write_design_csv(std::ostream& out, const DesignMatrix& design);
void write_outputs_csv(std::ostream& out, const std::vector<SobolOutputs>& outputs);
void write_indices_json(std::ostream& out, const DesignMatrix& design,
                        const std::map<std::string, std::optional<SobolIndices>>& indices);

struct SobolRequest {
  ParameterSpace space = ParameterSpace::behavioural_defaults();
  std::size_t n_base = 256;
  bool second_order = false;
  std::size_t bootstrap_resamples = 100;
};

// sobol: <out>/<name>/{design,outputs}.csv and indices.json. Returns the
// campaign directory.
std::filesystem::path run_sobol(const ExperimentConfig& config, const SobolRequest& request,
                                const std::filesystem::path& out_dir, int threads = 1);

}  // namespace ablum
