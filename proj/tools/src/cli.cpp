#include "ablum_cli/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>

#include "ablum/config.hpp"
#include "ablum/csv.hpp"
#include "ablum/errors.hpp"
#include "ablum/experiment.hpp"
#include "ablum/landscape.hpp"
#include "ablum/metrics.hpp"
#include "ablum/network.hpp"

namespace ablum::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::optional<int> reps;
  int threads = 1;
};

int default_threads() {
  if (const char* env = std::getenv("ABLUM_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

void add_globals(CLI::App& app, GlobalOptions& g) {
  app.add_option("--config", g.config, "Experiment configuration file");
  app.add_option("--seed", g.seed, "Base seed (overrides the config)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--reps", g.reps, "Replications (overrides the config)")
      ->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "Worker threads (default $ABLUM_THREADS or 1)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

ExperimentConfig resolve_config(const GlobalOptions& g) {
  ExperimentConfig c = g.config.empty() ? ExperimentConfig{} : load_config(g.config);
  if (g.seed) c.seed = *g.seed;
  if (g.reps) c.replications = *g.reps;
  validate(c);
  return c;
}

void write_text(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  writer(out);
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Agent-based land-use model with behavioural transitions", "ablum"};
  app.require_subcommand(0, 1);

  GlobalOptions g;
  g.threads = default_threads();
  add_globals(app, g);

  auto* run = app.add_subcommand("run", "Simulate each replicate until stable");
  auto* sweep = app.add_subcommand("sweep", "Full-factorial sweep over the [sweep] axes");
  auto* hyst = app.add_subcommand("hysteresis", "Run the attitude schedule and record the loop");
  auto* sobol = app.add_subcommand("sobol", "Saltelli design and Sobol' indices");
  auto* land = app.add_subcommand("landscape", "Write the capital fields");
  auto* metr = app.add_subcommand("metrics", "Recompute metrics from a land-use map CSV");
  for (auto* sub : {run, sweep, hyst, sobol, land, metr}) add_globals(*sub, g);

  SobolRequest request;
  sobol->add_option("--n-base", request.n_base, "Base sample size (power of two)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sobol->add_flag("--second-order", request.second_order, "Also estimate second-order indices");
  sobol->add_option("--bootstrap", request.bootstrap_resamples, "Bootstrap resamples")
      ->capture_default_str();

  bool edges = false;
  land->add_flag("--edges", edges, "Also write the social network edge list");

  std::string map_path;
  int connectivity = 4;
  metr->add_option("--map", map_path, "Land-use map CSV (x,y,aft_id)")->required();
  metr->add_option("--connectivity", connectivity, "Patch adjacency")
      ->check(CLI::IsMember({4, 8}))
      ->capture_default_str();

  if (argc <= 1) {
    err << app.help();
    return 2;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return 2;
  }

  if (app.get_subcommands().empty()) {
    err << "no subcommand given\n" << app.help();
    return 2;
  }

  try {
    const fs::path out_dir = g.out;
    if (run->parsed()) {
      for (const auto& dir : run_single(resolve_config(g), out_dir, g.threads)) {
        out << dir.string() << '\n';
      }
    } else if (sweep->parsed()) {
      out << run_sweep(resolve_config(g), out_dir, g.threads).string() << '\n';
    } else if (hyst->parsed()) {
      for (const auto& dir : run_hysteresis(resolve_config(g), out_dir, g.threads)) {
        out << dir.string() << '\n';
      }
    } else if (sobol->parsed()) {
      out << run_sobol(resolve_config(g), request, out_dir, g.threads).string() << '\n';
    } else if (land->parsed()) {
      const auto config = resolve_config(g);
      const fs::path dir = out_dir / config.name;
      const auto fields = build_capitals(config);
      write_text(dir / "capitals.csv",
                 [&](std::ostream& o) { write_capitals_csv(o, fields); });
      if (edges) {
        const auto state = build_state(config, config.seed);
        write_text(dir / "edges.csv",
                   [&](std::ostream& o) { write_edge_list_csv(o, state.network); });
      }
      out << dir.string() << '\n';
    } else if (metr->parsed()) {
      std::ifstream in(map_path, std::ios::binary);
      if (!in) throw IoError("cannot open map file " + map_path);
      const auto raster = read_map_csv(in);
      std::array<std::size_t, kAftCount> counts{};
      for (auto l : raster.labels) ++counts[l];
      const double n = static_cast<double>(raster.labels.size());
      const double mesh =
          mesh_connectivity(raster.width, raster.height, raster.labels,
                            connectivity == 8 ? Connectivity::kEight : Connectivity::kFour);
      out << "share_c,share_mi,share_hi,mesh\n"
          << csv::fixed6(counts[0] / n) << ',' << csv::fixed6(counts[1] / n) << ','
          << csv::fixed6(counts[2] / n) << ',' << csv::fixed6(mesh) << '\n';
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace ablum::cli
