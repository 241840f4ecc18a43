#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ablum/behaviour.hpp"
#include "ablum/network.hpp"

namespace ablum {

enum class AftId : std::uint8_t {
  kConservation = 0,
  kMediumIntensity = 1,
  kHighIntensity = 2,
};

inline constexpr std::size_t kAftCount = 3;

constexpr std::size_t to_index(AftId id) noexcept { return static_cast<std::size_t>(id); }
constexpr AftId aft_from_index(std::size_t i) noexcept { return static_cast<AftId>(i); }

const char* aft_name(AftId id) noexcept;

// A land-management practice: intensity level and capital sensitivities.
struct AgentFunctionalType {
  AftId id = AftId::kConservation;
  double intensity = 0.0;
  double s_prod = 0.0;
  double s_nat = 1.0;

  friend bool operator==(const AgentFunctionalType&, const AgentFunctionalType&) = default;
};

// Indexed by AftId.
using AftTable = std::array<AgentFunctionalType, kAftCount>;

// Conservation (I=0, 0/1), Medium (I=0.5, 0.5/0.5), High (I=1, 1/0).
AftTable canonical_afts();

// Sensitivities in [0,1], ids matching their slot, intensities strictly increasing.
void validate(const AftTable& afts);

// Shares of (Conservation, Medium, High), indexed by AftId.
using Shares = std::array<double, kAftCount>;

struct Peak {
  double cx = 0.0;
  double cy = 0.0;
  double sigma = 1.0;

  friend bool operator==(const Peak&, const Peak&) = default;
};

// Row-major capital rasters.
struct CapitalFields {
  int width = 0;
  int height = 0;
  std::vector<double> c_prod;
  std::vector<double> c_nat;
};

// Natural capital is the maximum over Gaussian peaks plus uniform noise in
// [-noise_amp, noise_amp]; productive capital is one minus the noise-free
// natural capital plus independent noise. Both clamped to [0, 1].
CapitalFields generate_capitals(int width, int height, std::span<const Peak> peaks,
                                double noise_amp, std::uint64_t seed);

// Two symmetric peaks in a productive valley, scaled to the grid. On 101x101
// this gives peaks (30,50) and (70,50) with sigma 12.
std::vector<Peak> default_peaks(int width, int height);

// Natural capital rising linearly from 0 at x=0 to 1 at x=width-1, productive
// capital its complement. Swapping the two fields equals a horizontal mirror.
CapitalFields gradient_capitals(int width, int height);

void write_capitals_csv(std::ostream& out, const CapitalFields& fields);

struct Cell {
  int x = 0;
  int y = 0;
  double c_prod = 0.0;
  double c_nat = 0.0;
  AftId aft = AftId::kConservation;
  BehaviouralProfile profile;
};

struct LandscapeGrid {
  int width = 0;
  int height = 0;
  std::vector<Cell> cells;

  std::size_t size() const noexcept { return cells.size(); }
  CellIndex index(int x, int y) const noexcept {
    return static_cast<CellIndex>(y * width + x);
  }
  Cell& at(int x, int y) { return cells.at(index(x, y)); }
  const Cell& at(int x, int y) const { return cells.at(index(x, y)); }
};

// Grid over the given capitals with every cell Conservation and the given
// profile.
LandscapeGrid make_grid(const CapitalFields& fields, const BehaviouralProfile& profile = {});

// Draws each cell's AFT independently with probabilities `shares`
// (which must sum to 1 within 1e-9).
void init_land_use(LandscapeGrid& grid, const Shares& shares, std::uint64_t seed);

struct Production {
  double material = 0.0;
  double non_material = 0.0;
};

inline Production production(const AgentFunctionalType& aft, const Cell& cell) noexcept {
  return {aft.s_prod * cell.c_prod, aft.s_nat * cell.c_nat};
}

// Land-use map as CSV "x,y,aft_id", row-major.
void write_map_csv(std::ostream& out, const LandscapeGrid& grid);

// AFT labels read back from a map CSV, row-major.
struct LandUseRaster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> labels;
};

// Throws IoError for a malformed file, unknown AFT ids, or missing or
// duplicate cells.
LandUseRaster read_map_csv(std::istream& in);

}  // namespace ablum
