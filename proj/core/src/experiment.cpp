#include "ablum/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "ablum/csv.hpp"
#include "ablum/errors.hpp"
#include "ablum/network.hpp"
#include "ablum/rng.hpp"

namespace ablum {

namespace fs = std::filesystem;

double extensive_scale(const ExperimentConfig& config) {
  if (!config.scale_to_reference) return 1.0;
  return static_cast<double>(config.width) * config.height / config.reference_cells;
}

CapitalFields build_capitals(const ExperimentConfig& config) {
  CapitalFields fields;
  if (config.layout == CapitalLayout::kGradient) {
    fields = gradient_capitals(config.width, config.height);
  } else {
    const auto peaks =
        config.peaks.empty() ? default_peaks(config.width, config.height) : config.peaks;
    fields = generate_capitals(config.width, config.height, peaks, config.noise_amp,
                               config.noise_seed);
  }
  if (config.swap_capitals) std::swap(fields.c_prod, fields.c_nat);
  return fields;
}

SimulationState build_state(const ExperimentConfig& config, std::uint64_t seed) {
  validate(config);
  SimulationState state;
  state.grid = make_grid(build_capitals(config), config.behaviour);
  state.afts = config.afts;
  state.globals = config.globals;

  // Six draws per cell whatever the sigmas, so changing one sigma leaves the
  // other parameters' offsets in place.
  Rng profiles = make_rng(seed, Stream::kProfiles);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& mean = config.behaviour;
  const auto& sd = config.spread;
  state.attitude_offsets.resize(state.grid.size());
  for (std::size_t i = 0; i < state.grid.size(); ++i) {
    std::array<double, 6> z{};
    for (auto& v : z) v = normal(profiles);
    auto& p = state.grid.cells[i].profile;
    state.attitude_offsets[i] = sd.attitude * z[0];
    p.attitude = std::clamp(mean.attitude + state.attitude_offsets[i], -1.0, 1.0);
    p.inertia_coeff = std::clamp(mean.inertia_coeff + sd.inertia_coeff * z[1], 0.0, 1.0);
    p.norm_weight = std::clamp(mean.norm_weight + sd.norm_weight * z[2], 0.0, 1.0);
    p.cm_int = std::clamp(mean.cm_int + sd.cm_int * z[3], 0.0, 1.0);
    p.cm_ext = std::clamp(mean.cm_ext + sd.cm_ext * z[4], 0.0, 1.0);
    p.git_upper = std::clamp(mean.git_upper + sd.git_upper * z[5], 0.0, 1.0);
  }

  init_land_use(state.grid, config.initial_shares, seed);

  const double scale = extensive_scale(config);
  NetworkConfig net;
  net.moore_radius = config.moore_radius;
  net.n_teleconnections = std::llround(static_cast<double>(config.n_tele) * scale);
  net.seed = seed;
  state.network = build_network(config.width, config.height, net);

  state.demand.d_mat = config.demand_mat * scale;
  state.demand.d_nm = config.demand_nm * scale;
  state.rng = make_rng(seed, Stream::kDynamics);
  refresh_supply(state);
  return state;
}

std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate) {
  return base_seed + static_cast<std::uint64_t>(replicate);
}

std::string run_id(const ExperimentConfig& config, std::uint64_t seed) {
  return config.name + "-s" + std::to_string(seed);
}

RunOutcome simulate(const ExperimentConfig& config, std::uint64_t seed) {
  SimulationState state = build_state(config, seed);
  RunOutcome out;
  out.seed = seed;
  out.result = config.schedule ? run_with_schedule(state, *config.schedule, config.stop)
                               : run_until_stable(state, config.stop);
  const auto& last = out.result.trajectory.back();
  out.final_shares = last.shares;
  out.s_mat = last.s_mat;
  out.s_nm = last.s_nm;
  out.mesh = mesh_connectivity(state.grid);
  out.final_grid = std::move(state.grid);
  return out;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  const auto workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

namespace {

using csv::fixed6;

std::ofstream open_output(const fs::path& path) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
  auto out = open_output(path);
  writer(out);
  finish(out, path);
}

void write_trajectory_row(std::ostream& out, const TrajectoryRow& r) {
  out << r.tick << ',' << fixed6(r.shares[0]) << ',' << fixed6(r.shares[1]) << ','
      << fixed6(r.shares[2]) << ',' << fixed6(r.s_mat) << ',' << fixed6(r.s_nm) << ','
      << fixed6(r.mean_attitude);
}

constexpr const char* kTrajectoryHeader = "tick,share_c,share_mi,share_hi,s_mat,s_nm,mean_attitude";

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << kTrajectoryHeader << '\n';
  for (const auto& r : trajectory) {
    write_trajectory_row(out, r);
    out << '\n';
  }
}

void write_hysteresis_csv(std::ostream& out, const Trajectory& trajectory,
                          const AttitudeSchedule& schedule) {
  out << kTrajectoryHeader << ",schedule_attitude\n";
  for (const auto& r : trajectory) {
    write_trajectory_row(out, r);
    out << ',' << fixed6(schedule.at(r.tick)) << '\n';
  }
}

void write_metrics_header(std::ostream& out) {
  out << "run_id,seed,final_share_c,final_share_mi,final_share_hi,s_mat,s_nm,mesh,"
         "stabilised_at\n";
}

void write_metrics_row(std::ostream& out, const std::string& id, const RunOutcome& o) {
  out << id << ',' << o.seed << ',' << fixed6(o.final_shares[0]) << ','
      << fixed6(o.final_shares[1]) << ',' << fixed6(o.final_shares[2]) << ',' << fixed6(o.s_mat)
      << ',' << fixed6(o.s_nm) << ',' << fixed6(o.mesh) << ',' << o.result.stabilised_at << '\n';
}

namespace {

std::vector<fs::path> run_replicates(const ExperimentConfig& config, const fs::path& out_dir,
                                      int threads, bool hysteresis) {
  validate(config);
  const auto reps = static_cast<std::size_t>(config.replications);
  std::vector<fs::path> dirs(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    const auto seed = replicate_seed(config.seed, static_cast<int>(r));
    const RunOutcome o = simulate(config, seed);
    const auto id = run_id(config, seed);
    const fs::path dir = out_dir / id;
    if (hysteresis) {
      write_file(dir / "hysteresis.csv", [&](std::ostream& out) {
        write_hysteresis_csv(out, o.result.trajectory, *config.schedule);
      });
    } else {
      write_file(dir / "trajectory.csv",
                 [&](std::ostream& out) { write_trajectory_csv(out, o.result.trajectory); });
    }
    write_file(dir / "metrics.csv", [&](std::ostream& out) {
      write_metrics_header(out);
      write_metrics_row(out, id, o);
    });
    write_file(dir / "map.csv", [&](std::ostream& out) { write_map_csv(out, o.final_grid); });
    dirs[r] = dir;
  });
  return dirs;
}

}  // namespace

std::vector<fs::path> run_single(const ExperimentConfig& config, const fs::path& out_dir,
                                 int threads) {
  return run_replicates(config, out_dir, threads, false);
}

std::vector<fs::path> run_hysteresis(const ExperimentConfig& config, const fs::path& out_dir,
                                     int threads) {
  if (!config.schedule) throw UsageError("hysteresis needs a [schedule] with breakpoints");
  return run_replicates(config, out_dir, threads, true);
}

std::vector<SweepRow> evaluate_sweep(const ExperimentConfig& config, int threads) {
  validate(config);
  if (config.sweep.empty()) throw UsageError("sweep needs at least one [sweep] axis");

  // Full factorial, first axis varying slowest.
  std::vector<std::vector<double>> points{{}};
  for (const auto& axis : config.sweep) {
    std::vector<std::vector<double>> next;
    for (const auto& p : points) {
      for (double v : axis.values()) {
        auto q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }

  const auto reps = static_cast<std::size_t>(config.replications);
  std::vector<SweepRow> rows(points.size() * reps);
  parallel_for(rows.size(), threads, [&](std::size_t k) {
    SweepRow& row = rows[k];
    row.point = k / reps;
    row.replicate = static_cast<int>(k % reps);
    row.seed = replicate_seed(config.seed, row.replicate);
    row.values = points[row.point];
    ExperimentConfig c = config;
    for (std::size_t a = 0; a < config.sweep.size(); ++a) {
      set_parameter(c, config.sweep[a].name, row.values[a]);
    }
    validate(c);
    row.outcome = simulate(c, row.seed);
    row.outcome.result.trajectory.clear();
    row.outcome.result.trajectory.shrink_to_fit();
    row.outcome.final_grid = {};
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, const ExperimentConfig& config,
                     const std::vector<SweepRow>& rows) {
  out << "point,rep,seed";
  for (const auto& axis : config.sweep) out << ',' << axis.name;
  out << ",final_share_c,final_share_mi,final_share_hi,s_mat,s_nm,mesh,stabilised_at\n";
  for (const auto& r : rows) {
    const auto& o = r.outcome;
    out << r.point << ',' << r.replicate << ',' << r.seed;
    for (double v : r.values) out << ',' << fixed6(v);
    out << ',' << fixed6(o.final_shares[0]) << ',' << fixed6(o.final_shares[1]) << ','
        << fixed6(o.final_shares[2]) << ',' << fixed6(o.s_mat) << ',' << fixed6(o.s_nm) << ','
        << fixed6(o.mesh) << ',' << o.result.stabilised_at << '\n';
  }
}

fs::path run_sweep(const ExperimentConfig& config, const fs::path& out_dir, int threads) {
  const auto rows = evaluate_sweep(config, threads);
  const fs::path path = out_dir / config.name / "sweep.csv";
  write_file(path, [&](std::ostream& out) { write_sweep_csv(out, config, rows); });
  return path;
}

std::vector<SobolOutputs> evaluate_design(const ExperimentConfig& base,
                                          const ParameterSpace& space,
                                          const DesignMatrix& design, int threads) {
  validate(base);
  if (design.cols != space.size()) {
    throw UsageError("design has " + std::to_string(design.cols) + " columns, space has " +
                     std::to_string(space.size()));
  }
  const int reps = base.replications;
  std::vector<SobolOutputs> outputs(design.rows);
  parallel_for(design.rows, threads, [&](std::size_t r) {
    const ExperimentConfig c = map_sample_to_config(design.row(r), space, base);
    SobolOutputs acc{};
    for (int rep = 0; rep < reps; ++rep) {
      const RunOutcome o = simulate(c, replicate_seed(base.seed, rep));
      const SobolOutputs v{o.final_shares[0], o.final_shares[1], o.final_shares[2], o.s_mat,
                           o.s_nm};
      for (std::size_t m = 0; m < v.size(); ++m) acc[m] += v[m];
    }
    for (auto& v : acc) v /= reps;
    outputs[r] = acc;
  });
  return outputs;
}

std::map<std::string, std::optional<SobolIndices>> analyse_design(
    const DesignMatrix& design, const std::vector<SobolOutputs>& outputs,
    const SobolOptions& options) {
  if (outputs.size() != design.rows) {
    throw UsageError("got " + std::to_string(outputs.size()) + " outputs for " +
                     std::to_string(design.rows) + " design rows");
  }
  std::map<std::string, std::optional<SobolIndices>> result;
  std::vector<double> y(outputs.size());
  for (std::size_t m = 0; m < kSobolMetrics.size(); ++m) {
    for (std::size_t r = 0; r < outputs.size(); ++r) y[r] = outputs[r][m];
    try {
      result[kSobolMetrics[m]] = sobol_indices(design, y, options);
    } catch (const DegenerateVariance&) {
      result[kSobolMetrics[m]] = std::nullopt;
    }
  }
  return result;
}

void write_design_csv(std::ostream& out, const DesignMatrix& design) {
  out << "row";
  for (const auto& n : design.names) out << ',' << n;
  out << '\n';
  for (std::size_t r = 0; r < design.rows; ++r) {
    out << r;
    for (double v : design.row(r)) out << ',' << fixed6(v);
    out << '\n';
  }
}

void write_outputs_csv(std::ostream& out, const std::vector<SobolOutputs>& outputs) {
  out << "row";
  for (const auto* m : kSobolMetrics) out << ',' << m;
  out << '\n';
  for (std::size_t r = 0; r < outputs.size(); ++r) {
    out << r;
    for (double v : outputs[r]) out << ',' << fixed6(v);
    out << '\n';
  }
}

void write_indices_json(std::ostream& out, const DesignMatrix& design,
                        const std::map<std::string, std::optional<SobolIndices>>& indices) {
  using nlohmann::ordered_json;
  auto finite_or_null = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(); };
  ordered_json doc = ordered_json::object();
  for (const auto* metric : kSobolMetrics) {
    const auto it = indices.find(metric);
    if (it == indices.end() || !it->second) {
      doc[metric] = nullptr;
      continue;
    }
    const auto& s = *it->second;
    ordered_json s1, st, s2, conf_s1, conf_st, conf_s2;
    s1 = st = conf_s1 = conf_st = ordered_json::object();
    s2 = conf_s2 = ordered_json::object();
    for (std::size_t i = 0; i < design.cols; ++i) {
      const auto& name = design.names[i];
      s1[name] = finite_or_null(s.s1[i]);
      st[name] = finite_or_null(s.st[i]);
      conf_s1[name] = finite_or_null(s.s1_conf[i]);
      conf_st[name] = finite_or_null(s.st_conf[i]);
      if (!s.s2.empty()) {
        for (std::size_t j = i + 1; j < design.cols; ++j) {
          const auto key = name + "," + design.names[j];
          s2[key] = finite_or_null(s.s2[i][j]);
          conf_s2[key] = finite_or_null(s.s2_conf[i][j]);
        }
      }
    }
    ordered_json entry = {{"S1", s1}, {"ST", st}};
    ordered_json conf = {{"S1", conf_s1}, {"ST", conf_st}};
    if (!s.s2.empty()) {
      entry["S2"] = s2;
      conf["S2"] = conf_s2;
    }
    entry["conf"] = conf;
    doc[metric] = entry;
  }
  out << doc.dump(2) << '\n';
}

fs::path run_sobol(const ExperimentConfig& config, const SobolRequest& request,
                   const fs::path& out_dir, int threads) {
  validate(config);
  const DesignMatrix design =
      saltelli_sample(request.space, request.n_base, config.seed, request.second_order);
  const auto outputs = evaluate_design(config, request.space, design, threads);
  SobolOptions options;
  options.second_order = request.second_order;
  options.bootstrap_resamples = request.bootstrap_resamples;
  options.seed = config.seed;
  const auto indices = analyse_design(design, outputs, options);

  const fs::path dir = out_dir / config.name;
  write_file(dir / "design.csv", [&](std::ostream& out) { write_design_csv(out, design); });
  write_file(dir / "outputs.csv", [&](std::ostream& out) { write_outputs_csv(out, outputs); });
  write_file(dir / "indices.json",
             [&](std::ostream& out) { write_indices_json(out, design, indices); });
  return dir;
}

}  // namespace ablum
