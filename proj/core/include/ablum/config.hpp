#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ablum/behaviour.hpp"
#include "ablum/dynamics.hpp"
#include "ablum/landscape.hpp"

namespace ablum {

enum class CapitalLayout { kPeaks, kGradient };

// Standard deviation of the per-cell normal offset around each behavioural
// mean. Cell values are clamped to the parameter's range.
struct Heterogeneity {
  double attitude = 0.15;
  double inertia_coeff = 0.0;
  double norm_weight = 0.0;
  double cm_int = 0.0;
  double cm_ext = 0.0;
  double git_upper = 0.0;

  friend bool operator==(const Heterogeneity&, const Heterogeneity&) = default;
};

// One swept parameter, written "name:min:max:steps". `name` may join several
// keys with '+' to set them together (e.g. "cm_int+cm_ext").
struct SweepAxis {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  int steps = 2;

  std::vector<double> values() const;
  friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

SweepAxis parse_sweep_axis(std::string_view text);
std::string format_sweep_axis(const SweepAxis& axis);

struct ExperimentConfig {
  // [run]
  std::string name = "run";
  std::uint64_t seed = 1;
  int replications = 1;

  // [grid] Demands and teleconnection counts are given for a reference grid of
  // `reference_cells` cells and scaled to the actual grid when
  // scale_to_reference is set.
  int width = 101;
  int height = 101;
  bool scale_to_reference = true;
  double reference_cells = 101.0 * 101.0;

  // [capitals]
  CapitalLayout layout = CapitalLayout::kPeaks;
  std::vector<Peak> peaks;  // empty: default_peaks(width, height)
  double noise_amp = 0.0;
  std::uint64_t noise_seed = 0;
  bool swap_capitals = false;

  // [aft]
  AftTable afts = canonical_afts();

  // [behaviour]
  BehaviouralProfile behaviour;
  Heterogeneity spread;
  BehaviourGlobals globals;

  // [demand]
  double demand_mat = 4000.0;
  double demand_nm = 4000.0;

  // [network]
  int moore_radius = 1;
  long n_tele = 0;

  // [init]
  Shares initial_shares{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  // [schedule]
  std::optional<AttitudeSchedule> schedule;

  // [stop]
  StoppingRule stop;

  // [sweep]
  std::vector<SweepAxis> sweep;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Throws ConfigError naming the first offending key.
void validate(const ExperimentConfig& config);

// Parses the sectioned key-value format; unknown keys are rejected and the
// result is validated. `origin` prefixes error messages.
ExperimentConfig parse_config(std::string_view text, std::string_view origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical text form with every key; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

// Numeric access by key for sweeps and sensitivity designs. Integer keys are
// rounded half-up. set_parameter accepts '+'-joined keys.
void set_parameter(ExperimentConfig& config, std::string_view key, double value);
double get_parameter(const ExperimentConfig& config, std::string_view key);
bool is_numeric_parameter(std::string_view key);

double round_half_up(double value);

}  // namespace ablum
