#include "ablum/metrics.hpp"

#include <algorithm>
#include <string>

#include "ablum/errors.hpp"

namespace ablum {

Shares intensity_shares(const LandscapeGrid& grid) {
  std::array<std::size_t, kAftCount> counts{};
  for (const auto& c : grid.cells) ++counts[to_index(c.aft)];
  Shares shares{};
  const auto n = static_cast<double>(grid.size());
  for (std::size_t k = 0; k < kAftCount; ++k) shares[k] = counts[k] / n;
  return shares;
}

Supply total_supply(const LandscapeGrid& grid, const AftTable& afts) {
  Supply s;
  for (const auto& c : grid.cells) {
    const auto p = production(afts[to_index(c.aft)], c);
    s.material += p.material;
    s.non_material += p.non_material;
  }
  return s;
}

PatchDecomposition decompose_patches(int width, int height, std::span<const std::uint8_t> labels,
                                     Connectivity connectivity) {
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (labels.size() != n) {
    throw UsageError("label raster has " + std::to_string(labels.size()) + " cells, expected " +
                     std::to_string(n));
  }
  static constexpr int kDx[] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDy[] = {0, 0, 1, -1, 1, -1, 1, -1};
  const int directions = connectivity == Connectivity::kFour ? 4 : 8;

  PatchDecomposition out;
  out.total_area = n;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (seen[start]) continue;
    const auto label = labels[start];
    std::size_t area = 0;
    seen[start] = true;
    stack.push_back(start);
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      ++area;
      const int x = static_cast<int>(i % width);
      const int y = static_cast<int>(i / width);
      for (int d = 0; d < directions; ++d) {
        const int nx = x + kDx[d];
        const int ny = y + kDy[d];
        if (nx < 0 || ny < 0 || nx >= width || ny >= height) continue;
        const auto j = static_cast<std::size_t>(ny) * width + nx;
        if (!seen[j] && labels[j] == label) {
          seen[j] = true;
          stack.push_back(j);
        }
      }
    }
    out.patches.push_back({label, area});
  }
  return out;
}

double effective_mesh(const PatchDecomposition& patches) {
  if (patches.total_area == 0) return 0.0;
  double sum_sq = 0.0;
  for (const auto& p : patches.patches) {
    sum_sq += static_cast<double>(p.area) * static_cast<double>(p.area);
  }
  return sum_sq / static_cast<double>(patches.total_area);
}

double mesh_connectivity(int width, int height, std::span<const std::uint8_t> labels,
                         Connectivity connectivity) {
  return effective_mesh(decompose_patches(width, height, labels, connectivity));
}

double mesh_connectivity(const LandscapeGrid& grid, Connectivity connectivity) {
  std::vector<std::uint8_t> labels(grid.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = static_cast<std::uint8_t>(grid.cells[i].aft);
  }
  return mesh_connectivity(grid.width, grid.height, labels, connectivity);
}

RunSummary summarize_trajectory(const Trajectory& trajectory, int window, double epsilon) {
  if (trajectory.empty()) throw UsageError("cannot summarise an empty trajectory");
  const auto& last = trajectory.back();
  RunSummary s;
  s.final_shares = last.shares;
  s.s_mat = last.s_mat;
  s.s_nm = last.s_nm;
  s.final_tick = last.tick;

  if (window >= 0) {
    const auto w = static_cast<std::size_t>(window);
    for (std::size_t end = w + 1; end <= trajectory.size(); ++end) {
      bool stable = true;
      for (std::size_t k = 0; k < kAftCount && stable; ++k) {
        double lo = trajectory[end - w - 1].shares[k];
        double hi = lo;
        for (std::size_t r = end - w; r < end; ++r) {
          lo = std::min(lo, trajectory[r].shares[k]);
          hi = std::max(hi, trajectory[r].shares[k]);
        }
        stable = hi - lo < epsilon;
      }
      if (stable) {
        s.stabilised_at = trajectory[end - 1].tick;
        break;
      }
    }
  }
  return s;
}

}  // namespace ablum
