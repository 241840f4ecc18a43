#pragma once

// Variance-based global sensitivity analysis: Saltelli cross-sampling on a
// randomised Sobol' sequence with the Saltelli (2010) first-order, Jansen
// total-effect and Saltelli (2002) second-order estimators.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ablum/config.hpp"

namespace ablum {

enum class DimensionKind { kContinuous, kInteger };

struct Dimension {
  std::string name;  // configuration key
  double lower = 0.0;
  double upper = 1.0;
  DimensionKind kind = DimensionKind::kContinuous;
};

struct ParameterSpace {
  std::vector<Dimension> dimensions;

  std::size_t size() const noexcept { return dimensions.size(); }

  // A, w, lambda, CM_int, CM_ext, D_mat, D_nm, S_nb, N_tele.
  static ParameterSpace behavioural_defaults();
};

void validate(const ParameterSpace& space);

// Rows are grouped per base sample j as
//   A_j, AB_j^1 .. AB_j^d, [BA_j^1 .. BA_j^d,] B_j
// where AB^i is A with column i taken from B (and BA^i the reverse).
struct DesignMatrix {
  std::vector<std::string> names;
  std::size_t n_base = 0;
  bool second_order = false;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major

  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }
  std::size_t rows_per_base() const noexcept { return second_order ? 2 * cols + 2 : cols + 2; }
};

// n_base * (2d + 2) rows with second-order matrices, n_base * (d + 2)
// without. The base points come from a 2d-dimensional Sobol' sequence with a
// seeded random digital shift. Coordinates are scaled to [lower, upper]; integer
// dimensions are left continuous and rounded when mapped to a configuration.
DesignMatrix saltelli_sample(const ParameterSpace& space, std::size_t n_base,
                             std::uint64_t seed, bool second_order);

struct SobolIndices {
  std::vector<double> s1;
  std::vector<double> s1_conf;
  std::vector<double> st;
  std::vector<double> st_conf;
  // Upper triangle (i < j) is filled; other entries are NaN.
  std::vector<std::vector<double>> s2;
  std::vector<std::vector<double>> s2_conf;
};

struct SobolOptions {
  bool second_order = false;
  std::size_t bootstrap_resamples = 100;
  double confidence_level = 0.95;
  std::uint64_t seed = 0;
};

// `outputs` holds one model output per design row, in design order.
// Throws DegenerateVariance when the outputs have zero variance.
SobolIndices sobol_indices(std::size_t n_base, std::size_t dimensions,
                           std::span<const double> outputs, const SobolOptions& options);
SobolIndices sobol_indices(const DesignMatrix& design, std::span<const double> outputs,
                           const SobolOptions& options);

// Injects one design row into `base`: integer dimensions rounded half-up,
// git_upper_L fixed to 1 for every cell.
ExperimentConfig map_sample_to_config(std::span<const double> row, const ParameterSpace& space,
                                      const ExperimentConfig& base);

}  // namespace ablum
