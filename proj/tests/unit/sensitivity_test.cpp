#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include "ablum/config.hpp"
#include "ablum/errors.hpp"
#include "ablum/sensitivity.hpp"

using namespace ablum;

namespace {

ParameterSpace ishigami_space() {
  const double pi = std::numbers::pi;
  return {{{"x1", -pi, pi, DimensionKind::kContinuous},
           {"x2", -pi, pi, DimensionKind::kContinuous},
           {"x3", -pi, pi, DimensionKind::kContinuous}}};
}

std::vector<double> ishigami(const DesignMatrix& d) {
  std::vector<double> y(d.rows);
  for (std::size_t r = 0; r < d.rows; ++r) {
    const auto x = d.row(r);
    y[r] = std::sin(x[0]) + 7 * std::pow(std::sin(x[1]), 2) + 0.1 * std::pow(x[2], 4) * std::sin(x[0]);
  }
  return y;
}

}  // namespace

TEST(Saltelli, RowCounts) {
  ParameterSpace two{{{"a", 0, 1, DimensionKind::kContinuous}, {"b", 0, 1, DimensionKind::kContinuous}}};
  EXPECT_EQ(saltelli_sample(two, 8, 1, false).rows, 32u);
  const auto full = saltelli_sample(ParameterSpace::behavioural_defaults(), 256, 1, true);
  EXPECT_EQ(full.rows, 5120u);
  EXPECT_EQ(full.values.size(), 5120u * 9u);
}

TEST(Saltelli, WithinBoundsAndDeterministic) {
  const auto space = ParameterSpace::behavioural_defaults();
  const auto a = saltelli_sample(space, 64, 3, true);
  const auto b = saltelli_sample(space, 64, 3, true);
  const auto c = saltelli_sample(space, 64, 4, true);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  for (std::size_t r = 0; r < a.rows; ++r) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      EXPECT_GE(a.row(r)[k], space.dimensions[k].lower);
      EXPECT_LE(a.row(r)[k], space.dimensions[k].upper);
    }
  }
}

TEST(Saltelli, BlockStructure) {
  const auto space = ishigami_space();
  const auto d = saltelli_sample(space, 4, 1, true);
  const std::size_t step = d.rows_per_base();
  for (std::size_t j = 0; j < d.n_base; ++j) {
    const auto a = d.row(j * step);
    const auto b = d.row(j * step + step - 1);
    for (std::size_t i = 0; i < 3; ++i) {
      const auto ab = d.row(j * step + 1 + i);
      const auto ba = d.row(j * step + 1 + 3 + i);
      for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(ab[k], k == i ? b[k] : a[k]);
        EXPECT_EQ(ba[k], k == i ? a[k] : b[k]);
      }
    }
  }
}

TEST(Saltelli, InvalidInputsThrow) {
  EXPECT_THROW(saltelli_sample(ishigami_space(), 0, 1, false), ConfigError);
  ParameterSpace bad{{{"a", 1, 1, DimensionKind::kContinuous}}};
  EXPECT_THROW(saltelli_sample(bad, 8, 1, false), ConfigError);
  EXPECT_THROW(saltelli_sample(ParameterSpace{}, 8, 1, false), ConfigError);
}

TEST(Sobol, Ishigami) {
  const auto d = saltelli_sample(ishigami_space(), 1024, 1, false);
  SobolOptions opt;
  opt.bootstrap_resamples = 0;
  const auto s = sobol_indices(d, ishigami(d), opt);
  const double s1[] = {0.3139, 0.4424, 0.0};
  const double st[] = {0.5576, 0.4424, 0.2437};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(s.s1[i], s1[i], 0.05);
    EXPECT_NEAR(s.st[i], st[i], 0.05);
    EXPECT_LE(s.s1[i], s.st[i] + 0.05);
    EXPECT_GE(s.st[i], -0.02);
  }
}

TEST(Sobol, ErrorShrinksWithSampleSize) {
  const double st[] = {0.5576, 0.4424, 0.2437};
  auto error = [&](std::size_t n) {
    double e = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto d = saltelli_sample(ishigami_space(), n, seed, false);
      SobolOptions opt;
      opt.bootstrap_resamples = 0;
      const auto s = sobol_indices(d, ishigami(d), opt);
      for (int i = 0; i < 3; ++i) e += std::abs(s.st[i] - st[i]);
    }
    return e;
  };
  EXPECT_LT(error(2048), error(64));
}

TEST(Sobol, AdditiveHasNoInteractions) {
  ParameterSpace space;
  for (int i = 0; i < 4; ++i) {
    space.dimensions.push_back({"x" + std::to_string(i), 0, 1, DimensionKind::kContinuous});
  }
  const auto d = saltelli_sample(space, 1024, 2, true);
  std::vector<double> y(d.rows);
  for (std::size_t r = 0; r < d.rows; ++r) {
    const auto x = d.row(r);
    y[r] = std::accumulate(x.begin(), x.end(), 0.0);
  }
  SobolOptions opt;
  opt.second_order = true;
  opt.bootstrap_resamples = 50;
  const auto s = sobol_indices(d, y, opt);
  double sum = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    sum += s.s1[i];
    EXPECT_GT(s.s1_conf[i], 0.0);
    for (std::size_t k = 0; k < 4; ++k) {
      if (k > i) {
        EXPECT_NEAR(s.s2[i][k], 0.0, 0.03);
      } else {
        EXPECT_TRUE(std::isnan(s.s2[i][k]));
      }
    }
  }
  EXPECT_NEAR(sum, 1.0, 0.05);
}

TEST(Sobol, DegenerateVarianceThrows) {
  const auto d = saltelli_sample(ishigami_space(), 16, 1, false);
  std::vector<double> flat(d.rows, 2.5);
  EXPECT_THROW(sobol_indices(d, flat, {}), DegenerateVariance);
}

TEST(Sobol, MismatchedOutputsThrow) {
  const auto d = saltelli_sample(ishigami_space(), 16, 1, false);
  std::vector<double> y(d.rows - 1, 1.0);
  EXPECT_THROW(sobol_indices(d, y, {}), UsageError);
  SobolOptions second;
  second.second_order = true;
  EXPECT_THROW(sobol_indices(d, ishigami(d), second), UsageError);
}

TEST(Sobol, FirstOrderFromSecondOrderDesign) {
  const auto d = saltelli_sample(ishigami_space(), 256, 1, true);
  SobolOptions opt;
  opt.bootstrap_resamples = 0;
  const auto s = sobol_indices(d, ishigami(d), opt);
  EXPECT_TRUE(s.s2.empty());
  EXPECT_EQ(s.s1.size(), 3u);
}

TEST(Sobol, DeterministicBootstrap) {
  const auto d = saltelli_sample(ishigami_space(), 128, 1, false);
  SobolOptions opt;
  opt.seed = 5;
  const auto a = sobol_indices(d, ishigami(d), opt);
  const auto b = sobol_indices(d, ishigami(d), opt);
  EXPECT_EQ(a.s1_conf, b.s1_conf);
  EXPECT_EQ(a.st_conf, b.st_conf);
}

TEST(MapSample, LowerBounds) {
  const auto space = ParameterSpace::behavioural_defaults();
  std::vector<double> row;
  for (const auto& d : space.dimensions) row.push_back(d.lower);
  ExperimentConfig base;
  base.behaviour.git_upper = 0.3;
  const auto c = map_sample_to_config(row, space, base);
  EXPECT_EQ(c.behaviour.attitude, -1.0);
  EXPECT_EQ(c.behaviour.norm_weight, 0.0);
  EXPECT_EQ(c.behaviour.inertia_coeff, 0.0);
  EXPECT_DOUBLE_EQ(c.behaviour.cm_int, 0.1);
  EXPECT_DOUBLE_EQ(c.behaviour.cm_ext, 0.1);
  EXPECT_EQ(c.demand_mat, 3000.0);
  EXPECT_EQ(c.demand_nm, 3000.0);
  EXPECT_EQ(c.moore_radius, 1);
  EXPECT_EQ(c.n_tele, 0);
  EXPECT_EQ(c.behaviour.git_upper, 1.0);
}

TEST(MapSample, IntegerRoundingAndFixedL) {
  const auto space = ParameterSpace::behavioural_defaults();
  const auto d = saltelli_sample(space, 32, 1, false);
  for (std::size_t r = 0; r < d.rows; ++r) {
    const auto c = map_sample_to_config(d.row(r), space, ExperimentConfig{});
    EXPECT_EQ(c.behaviour.git_upper, 1.0);
    EXPECT_EQ(c.spread.git_upper, 0.0);
  }
  std::vector<double> row;
  for (const auto& dim : space.dimensions) row.push_back(dim.lower);
  row[7] = 2.5;
  row[8] = 10.5;
  const auto c = map_sample_to_config(row, space, ExperimentConfig{});
  EXPECT_EQ(c.moore_radius, 3);
  EXPECT_EQ(c.n_tele, 11);
  EXPECT_THROW(map_sample_to_config(std::vector<double>{1.0}, space, ExperimentConfig{}), UsageError);
}
