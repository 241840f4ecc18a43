#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ablum/dynamics.hpp"
#include "ablum/landscape.hpp"

namespace ablum {

Shares intensity_shares(const LandscapeGrid& grid);

struct Supply {
  double material = 0.0;
  double non_material = 0.0;
};

Supply total_supply(const LandscapeGrid& grid, const AftTable& afts = canonical_afts());

enum class Connectivity { kFour = 4, kEight = 8 };

// Maximal connected components of equal label.
struct PatchDecomposition {
  struct Patch {
    std::uint8_t label = 0;
    std::size_t area = 0;
  };
  std::vector<Patch> patches;
  std::size_t total_area = 0;
};

PatchDecomposition decompose_patches(int width, int height, std::span<const std::uint8_t> labels,
                                     Connectivity connectivity);

// Effective mesh size: sum of squared patch areas over total area.
double effective_mesh(const PatchDecomposition& patches);

double mesh_connectivity(int width, int height, std::span<const std::uint8_t> labels,
                         Connectivity connectivity = Connectivity::kFour);
double mesh_connectivity(const LandscapeGrid& grid,
                         Connectivity connectivity = Connectivity::kFour);

struct RunSummary {
  Shares final_shares{};
  double s_mat = 0.0;
  double s_nm = 0.0;
  int final_tick = 0;
  // First tick at which the trailing-window criterion holds, -1 if never.
  int stabilised_at = -1;
};

// Throws UsageError for an empty trajectory.
RunSummary summarize_trajectory(const Trajectory& trajectory, int window, double epsilon);

}  // namespace ablum
