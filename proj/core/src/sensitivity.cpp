#include "ablum/sensitivity.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/random/sobol.hpp>

#include <cmath>
#include <limits>
#include <numeric>

#include "ablum/errors.hpp"
#include "ablum/rng.hpp"

namespace ablum {

ParameterSpace ParameterSpace::behavioural_defaults() {
  using K = DimensionKind;
  return {{
      {"attitude_mean", -1.0, 1.0, K::kContinuous},
      {"norm_weight_w", 0.0, 1.0, K::kContinuous},
      {"inertia_lambda", 0.0, 0.5, K::kContinuous},
      {"cm_int", 0.1, 0.8, K::kContinuous},
      {"cm_ext", 0.1, 0.8, K::kContinuous},
      {"demand_mat", 3000.0, 5000.0, K::kContinuous},
      {"demand_nm", 3000.0, 5000.0, K::kContinuous},
      {"moore_radius", 1.0, 5.0, K::kInteger},
      {"n_tele", 0.0, 2500.0, K::kInteger},
  }};
}

void validate(const ParameterSpace& space) {
  if (space.dimensions.empty()) throw ConfigError("parameter space has no dimensions");
  for (const auto& d : space.dimensions) {
    if (!(d.lower < d.upper)) {
      throw ConfigError("parameter '" + d.name + "' needs lower < upper");
    }
    if (d.name.empty()) throw ConfigError("parameter space has an unnamed dimension");
  }
}

DesignMatrix saltelli_sample(const ParameterSpace& space, std::size_t n_base, std::uint64_t seed,
                             bool second_order) {
  if (n_base == 0) throw ConfigError("n_base must be positive");
  validate(space);
  const std::size_t d = space.size();

  DesignMatrix m;
  for (const auto& dim : space.dimensions) m.names.push_back(dim.name);
  m.n_base = n_base;
  m.second_order = second_order;
  m.cols = d;
  m.rows = n_base * m.rows_per_base();
  m.values.resize(m.rows * d);

  // Random digital shift: XOR every coordinate's bits with a per-dimension mask.
  Rng rng = make_rng(seed, Stream::kDesign);
  std::vector<std::uint64_t> shift(2 * d);
  for (auto& s : shift) s = rng();

  boost::random::sobol qrng(2 * d);
  std::vector<double> point(2 * d);
  auto scale = [&](std::size_t dim, double u) {
    const auto& p = space.dimensions[dim];
    return p.lower + u * (p.upper - p.lower);
  };

  std::size_t r = 0;
  auto put = [&](auto&& value_at) {
    for (std::size_t k = 0; k < d; ++k) m.values[r * d + k] = value_at(k);
    ++r;
  };

  for (std::size_t j = 0; j < n_base; ++j) {
    for (std::size_t k = 0; k < 2 * d; ++k) {
      const std::uint64_t bits = static_cast<std::uint64_t>(qrng()) ^ shift[k];
      point[k] = static_cast<double>(bits >> 11) * 0x1.0p-53;
    }
    auto a = [&](std::size_t k) { return scale(k, point[k]); };
    auto b = [&](std::size_t k) { return scale(k, point[d + k]); };

    put(a);
    for (std::size_t i = 0; i < d; ++i) {
      put([&](std::size_t k) { return k == i ? b(k) : a(k); });
    }
    if (second_order) {
      for (std::size_t i = 0; i < d; ++i) {
        put([&](std::size_t k) { return k == i ? a(k) : b(k); });
      }
    }
    put(b);
  }
  return m;
}

namespace {

struct Blocks {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<std::vector<double>> ab;  // [i][j]
  std::vector<std::vector<double>> ba;
};

Blocks split_outputs(std::size_t n, std::size_t d, std::span<const double> y, bool second_order) {
  const std::size_t step = second_order ? 2 * d + 2 : d + 2;
  if (y.size() != n * step) {
    throw UsageError("expected " + std::to_string(n * step) + " outputs, got " +
                     std::to_string(y.size()));
  }
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  Blocks blk;
  blk.n = n;
  blk.d = d;
  blk.a.resize(n);
  blk.b.resize(n);
  blk.ab.assign(d, std::vector<double>(n));
  if (second_order) blk.ba.assign(d, std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const auto* row = y.data() + j * step;
    blk.a[j] = row[0] - mean;
    blk.b[j] = row[step - 1] - mean;
    for (std::size_t i = 0; i < d; ++i) {
      blk.ab[i][j] = row[1 + i] - mean;
      if (second_order) blk.ba[i][j] = row[1 + d + i] - mean;
    }
  }
  return blk;
}

// Estimates over the base-sample subset `idx` (with repetition for bootstrap).
struct Estimate {
  std::vector<double> s1, st;
  std::vector<std::vector<double>> s2;
};

Estimate estimate(const Blocks& blk, std::span<const std::size_t> idx, bool second_order) {
  const auto m = static_cast<double>(idx.size());
  // Population variance of the stacked A and B outputs.
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto j : idx) {
    sum += blk.a[j] + blk.b[j];
    sum_sq += blk.a[j] * blk.a[j] + blk.b[j] * blk.b[j];
  }
  const double mean = sum / (2.0 * m);
  const double var = sum_sq / (2.0 * m) - mean * mean;

  Estimate e;
  e.s1.resize(blk.d);
  e.st.resize(blk.d);
  for (std::size_t i = 0; i < blk.d; ++i) {
    double first = 0.0;
    double total = 0.0;
    for (const auto j : idx) {
      const double diff = blk.ab[i][j] - blk.a[j];
      first += blk.b[j] * diff;
      total += diff * diff;
    }
    e.s1[i] = first / m / var;
    e.st[i] = 0.5 * total / m / var;
  }
  if (second_order) {
    e.s2.assign(blk.d, std::vector<double>(blk.d, std::numeric_limits<double>::quiet_NaN()));
    for (std::size_t i = 0; i < blk.d; ++i) {
      for (std::size_t k = i + 1; k < blk.d; ++k) {
        double v = 0.0;
        for (const auto j : idx) v += blk.ba[i][j] * blk.ab[k][j] - blk.a[j] * blk.b[j];
        e.s2[i][k] = v / m / var - e.s1[i] - e.s1[k];
      }
    }
  }
  return e;
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

SobolIndices sobol_indices(std::size_t n_base, std::size_t dimensions,
                           std::span<const double> outputs, const SobolOptions& options) {
  if (n_base == 0 || dimensions == 0) throw UsageError("empty Sobol design");
  const Blocks blk = split_outputs(n_base, dimensions, outputs, options.second_order);

  std::vector<std::size_t> all(n_base);
  std::iota(all.begin(), all.end(), std::size_t{0});
  {
    const double mean = std::accumulate(outputs.begin(), outputs.end(), 0.0) /
                        static_cast<double>(outputs.size());
    double ss = 0.0;
    for (double y : outputs) ss += (y - mean) * (y - mean);
    if (!(ss > 0.0)) throw DegenerateVariance("model output has zero variance");
  }

  const Estimate point = estimate(blk, all, options.second_order);
  SobolIndices out;
  out.s1 = point.s1;
  out.st = point.st;
  out.s2 = point.s2;
  out.s1_conf.assign(dimensions, 0.0);
  out.st_conf.assign(dimensions, 0.0);
  if (options.second_order) {
    out.s2_conf.assign(dimensions,
                       std::vector<double>(dimensions, std::numeric_limits<double>::quiet_NaN()));
  }

  const std::size_t resamples = options.bootstrap_resamples;
  if (resamples < 2) return out;

  Rng rng = make_rng(options.seed, Stream::kBootstrap);
  std::uniform_int_distribution<std::size_t> pick(0, n_base - 1);
  std::vector<std::vector<double>> s1_boot(dimensions), st_boot(dimensions);
  std::vector<std::vector<std::vector<double>>> s2_boot(
      options.second_order ? dimensions : 0, std::vector<std::vector<double>>(dimensions));
  std::vector<std::size_t> idx(n_base);
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& j : idx) j = pick(rng);
    const Estimate e = estimate(blk, idx, options.second_order);
    for (std::size_t i = 0; i < dimensions; ++i) {
      s1_boot[i].push_back(e.s1[i]);
      st_boot[i].push_back(e.st[i]);
      if (options.second_order) {
        for (std::size_t k = i + 1; k < dimensions; ++k) s2_boot[i][k].push_back(e.s2[i][k]);
      }
    }
  }
  const boost::math::normal standard;
  const double z = boost::math::quantile(standard, 0.5 + options.confidence_level / 2.0);
  for (std::size_t i = 0; i < dimensions; ++i) {
    out.s1_conf[i] = z * sample_sd(s1_boot[i]);
    out.st_conf[i] = z * sample_sd(st_boot[i]);
    if (options.second_order) {
      for (std::size_t k = i + 1; k < dimensions; ++k) {
        out.s2_conf[i][k] = z * sample_sd(s2_boot[i][k]);
      }
    }
  }
  return out;
}

SobolIndices sobol_indices(const DesignMatrix& design, std::span<const double> outputs,
                           const SobolOptions& options) {
  if (options.second_order && !design.second_order) {
    throw UsageError("second-order indices need a design sampled with second_order");
  }
  if (design.second_order != options.second_order) {
    SobolOptions adjusted = options;
    adjusted.second_order = design.second_order;
    auto r = sobol_indices(design.n_base, design.cols, outputs, adjusted);
    r.s2.clear();
    r.s2_conf.clear();
    return r;
  }
  return sobol_indices(design.n_base, design.cols, outputs, options);
}

ExperimentConfig map_sample_to_config(std::span<const double> row, const ParameterSpace& space,
                                      const ExperimentConfig& base) {
  if (row.size() != space.size()) {
    throw UsageError("design row has " + std::to_string(row.size()) + " values, space has " +
                     std::to_string(space.size()) + " dimensions");
  }
  ExperimentConfig c = base;
  for (std::size_t k = 0; k < row.size(); ++k) {
    const auto& dim = space.dimensions[k];
    const double v = dim.kind == DimensionKind::kInteger ? round_half_up(row[k]) : row[k];
    set_parameter(c, dim.name, v);
  }
  c.behaviour.git_upper = 1.0;
  c.spread.git_upper = 0.0;
  return c;
}

}  // namespace ablum
