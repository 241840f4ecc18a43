#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace ablum {

using CellIndex = std::uint32_t;

struct NetworkConfig {
  int moore_radius = 1;
  long n_teleconnections = 0;
  std::uint64_t seed = 0;
};

// Undirected, unweighted graph over grid cells. Adjacency lists are kept
// sorted, symmetric, and free of self-loops and duplicates.
class SocialNetwork {
 public:
  SocialNetwork() = default;
  explicit SocialNetwork(std::size_t node_count) : adjacency_(node_count) {}

  std::size_t size() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::size_t degree(CellIndex i) const { return adjacency_.at(i).size(); }
  std::span<const CellIndex> neighbours(CellIndex i) const { return adjacency_.at(i); }

  bool adjacent(CellIndex i, CellIndex j) const;

  // Returns false (and leaves the graph unchanged) for self-loops and
  // existing edges.
  bool add_edge(CellIndex i, CellIndex j);

  friend bool operator==(const SocialNetwork&, const SocialNetwork&) = default;

 private:
  std::vector<std::vector<CellIndex>> adjacency_;
  std::size_t edge_count_ = 0;
};

// Links every cell to all cells within Chebyshev distance `moore_radius`.
// Boundaries are hard; the radius must be below min(width, height).
SocialNetwork build_lattice(int width, int height, int moore_radius);

// Adds exactly `n_tele` edges between uniformly drawn cell pairs that are
// neither identical nor already adjacent (rejection sampling).
SocialNetwork add_teleconnections(SocialNetwork network, long n_tele, std::uint64_t seed);

SocialNetwork build_network(int width, int height, const NetworkConfig& config);

enum class IntensityDirection { kAtOrAbove, kAtOrBelow };

struct IntensityPredicate {
  IntensityDirection direction;
  double threshold;

  bool operator()(double intensity) const noexcept {
    return direction == IntensityDirection::kAtOrAbove ? intensity >= threshold
                                                       : intensity <= threshold;
  }
};

// Fraction of the neighbours of `i` whose intensity satisfies `predicate`.
// Throws UndefinedFraction for an isolated cell.
double neighbour_intensity_fraction(const SocialNetwork& network,
                                    std::span<const double> intensities, CellIndex i,
                                    IntensityPredicate predicate);

// Edge list as CSV "i,j" with i < j, sorted.
void write_edge_list_csv(std::ostream& out, const SocialNetwork& network);

}  // namespace ablum
