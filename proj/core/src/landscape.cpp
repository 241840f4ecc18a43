#include "ablum/landscape.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <cmath>
#include <ostream>
#include <string>

#include "ablum/csv.hpp"
#include "ablum/errors.hpp"
#include "ablum/rng.hpp"

namespace ablum {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void check_dims(int width, int height) {
  if (width < 3 || height < 3) {
    throw ConfigError("grid dimensions must be at least 3x3, got " + std::to_string(width) +
                      "x" + std::to_string(height));
  }
}

}  // namespace

const char* aft_name(AftId id) noexcept {
  switch (id) {
    case AftId::kConservation: return "Conservation";
    case AftId::kMediumIntensity: return "MediumIntensity";
    case AftId::kHighIntensity: return "HighIntensity";
  }
  return "?";
}

AftTable canonical_afts() {
  return {{
      {AftId::kConservation, 0.0, 0.0, 1.0},
      {AftId::kMediumIntensity, 0.5, 0.5, 0.5},
      {AftId::kHighIntensity, 1.0, 1.0, 0.0},
  }};
}

void validate(const AftTable& afts) {
  for (std::size_t i = 0; i < kAftCount; ++i) {
    const auto& a = afts[i];
    if (a.id != aft_from_index(i)) throw ConfigError("AFT table slot " + std::to_string(i) + " has a mismatched id");
    const std::string name = aft_name(a.id);
    if (a.intensity < 0.0 || a.intensity > 1.0) throw ConfigError(name + " intensity outside [0, 1]");
    if (a.s_prod < 0.0 || a.s_prod > 1.0) throw ConfigError(name + " s_prod outside [0, 1]");
    if (a.s_nat < 0.0 || a.s_nat > 1.0) throw ConfigError(name + " s_nat outside [0, 1]");
  }
  if (!(afts[0].intensity < afts[1].intensity && afts[1].intensity < afts[2].intensity)) {
    throw ConfigError("AFT intensities must be strictly increasing Conservation < Medium < High");
  }
}

CapitalFields generate_capitals(int width, int height, std::span<const Peak> peaks,
                                double noise_amp, std::uint64_t seed) {
  check_dims(width, height);
  if (noise_amp < 0.0 || noise_amp > 0.2) {
    throw ConfigError("noise_amp must lie in [0, 0.2], got " + std::to_string(noise_amp));
  }
  for (const auto& p : peaks) {
    if (!(p.sigma > 0.0)) throw ConfigError("peak sigma must be positive");
  }

  CapitalFields f{width, height, {}, {}};
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  f.c_prod.resize(n);
  f.c_nat.resize(n);

  Rng rng = make_rng(seed, Stream::kCapitals);
  auto noise = [&] { return noise_amp * (2.0 * uniform01(rng) - 1.0); };

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double nat = 0.0;
      for (const auto& p : peaks) {
        const double dx = x - p.cx;
        const double dy = y - p.cy;
        nat = std::max(nat, std::exp(-(dx * dx + dy * dy) / (2.0 * p.sigma * p.sigma)));
      }
      const auto i = static_cast<std::size_t>(y) * width + x;
      // Draw both noise terms unconditionally so the stream layout does not
      // depend on noise_amp.
      const double nat_noise = noise();
      const double prod_noise = noise();
      f.c_nat[i] = clamp01(nat + nat_noise);
      f.c_prod[i] = clamp01(1.0 - nat + prod_noise);
    }
  }
  return f;
}

std::vector<Peak> default_peaks(int width, int height) {
  const double w = width - 1;
  const double h = height - 1;
  const double sigma = 0.12 * w;
  return {{0.3 * w, 0.5 * h, sigma}, {0.7 * w, 0.5 * h, sigma}};
}

CapitalFields gradient_capitals(int width, int height) {
  check_dims(width, height);
  CapitalFields f{width, height, {}, {}};
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  f.c_prod.resize(n);
  f.c_nat.resize(n);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto i = static_cast<std::size_t>(y) * width + x;
      f.c_nat[i] = static_cast<double>(x) / (width - 1);
      f.c_prod[i] = static_cast<double>(width - 1 - x) / (width - 1);
    }
  }
  return f;
}

void write_capitals_csv(std::ostream& out, const CapitalFields& fields) {
  out << "x,y,c_prod,c_nat\n";
  for (int y = 0; y < fields.height; ++y) {
    for (int x = 0; x < fields.width; ++x) {
      const auto i = static_cast<std::size_t>(y) * fields.width + x;
      out << x << ',' << y << ',' << csv::fixed6(fields.c_prod[i]) << ','
          << csv::fixed6(fields.c_nat[i]) << '\n';
    }
  }
}

LandscapeGrid make_grid(const CapitalFields& fields, const BehaviouralProfile& profile) {
  check_dims(fields.width, fields.height);
  LandscapeGrid grid;
  grid.width = fields.width;
  grid.height = fields.height;
  grid.cells.resize(fields.c_prod.size());
  for (int y = 0; y < fields.height; ++y) {
    for (int x = 0; x < fields.width; ++x) {
      const auto i = grid.index(x, y);
      auto& c = grid.cells[i];
      c.x = x;
      c.y = y;
      c.c_prod = fields.c_prod[i];
      c.c_nat = fields.c_nat[i];
      c.profile = profile;
    }
  }
  return grid;
}

void init_land_use(LandscapeGrid& grid, const Shares& shares, std::uint64_t seed) {
  double sum = 0.0;
  for (double s : shares) {
    if (s < 0.0) throw ConfigError("initial shares must be non-negative");
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("initial shares must sum to 1, got " + std::to_string(sum));
  }
  Rng rng = make_rng(seed, Stream::kLandUse);
  const double c_cut = shares[0];
  const double mi_cut = shares[0] + shares[1];
  for (auto& cell : grid.cells) {
    const double u = uniform01(rng);
    if (u < c_cut) {
      cell.aft = AftId::kConservation;
    } else if (u < mi_cut) {
      cell.aft = AftId::kMediumIntensity;
    } else {
      cell.aft = AftId::kHighIntensity;
    }
  }
}

void write_map_csv(std::ostream& out, const LandscapeGrid& grid) {
  out << "x,y,aft_id\n";
  for (const auto& c : grid.cells) {
    out << c.x << ',' << c.y << ',' << static_cast<int>(c.aft) << '\n';
  }
}

LandUseRaster read_map_csv(std::istream& in) {
  const auto rows = csv::read(in, "x,y,aft_id");
  if (rows.empty()) throw IoError("map CSV has no cells");
  long long max_x = 0;
  long long max_y = 0;
  std::vector<std::array<long long, 3>> parsed;
  parsed.reserve(rows.size());
  for (const auto& r : rows) {
    const std::array<long long, 3> v{csv::to_integer(r[0]), csv::to_integer(r[1]),
                                     csv::to_integer(r[2])};
    if (v[0] < 0 || v[1] < 0) throw IoError("negative cell coordinate in map CSV");
    if (v[2] < 0 || v[2] >= static_cast<long long>(kAftCount)) {
      throw IoError("unknown aft_id " + std::to_string(v[2]) + " in map CSV");
    }
    max_x = std::max(max_x, v[0]);
    max_y = std::max(max_y, v[1]);
    parsed.push_back(v);
  }
  LandUseRaster raster;
  raster.width = static_cast<int>(max_x + 1);
  raster.height = static_cast<int>(max_y + 1);
  const auto cells = static_cast<std::size_t>(raster.width) * raster.height;
  if (cells != parsed.size()) {
    throw IoError("map CSV has " + std::to_string(parsed.size()) + " cells for a " +
                  std::to_string(raster.width) + "x" + std::to_string(raster.height) + " grid");
  }
  constexpr std::uint8_t kUnset = 0xff;
  raster.labels.assign(cells, kUnset);
  for (const auto& v : parsed) {
    auto& slot = raster.labels[static_cast<std::size_t>(v[1] * raster.width + v[0])];
    if (slot != kUnset) {
      throw IoError("duplicate cell (" + std::to_string(v[0]) + "," + std::to_string(v[1]) +
                    ") in map CSV");
    }
    slot = static_cast<std::uint8_t>(v[2]);
  }
  return raster;
}

}  // namespace ablum
