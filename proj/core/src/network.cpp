#include "ablum/network.hpp"

#include <algorithm>
#include <ostream>
#include <string>
#include <utility>

#include "ablum/errors.hpp"
#include "ablum/rng.hpp"

namespace ablum {

bool SocialNetwork::adjacent(CellIndex i, CellIndex j) const {
  const auto& a = adjacency_.at(i);
  return std::binary_search(a.begin(), a.end(), j);
}

bool SocialNetwork::add_edge(CellIndex i, CellIndex j) {
  if (i == j) return false;
  auto& ai = adjacency_.at(i);
  auto& aj = adjacency_.at(j);
  const auto pos_i = std::lower_bound(ai.begin(), ai.end(), j);
  if (pos_i != ai.end() && *pos_i == j) return false;
  ai.insert(pos_i, j);
  aj.insert(std::lower_bound(aj.begin(), aj.end(), i), i);
  ++edge_count_;
  return true;
}

SocialNetwork build_lattice(int width, int height, int moore_radius) {
  if (moore_radius < 1) throw ConfigError("moore_radius must be >= 1");
  if (moore_radius >= std::min(width, height)) {
    throw ConfigError("moore_radius " + std::to_string(moore_radius) +
                      " must be smaller than min(width, height) = " +
                      std::to_string(std::min(width, height)));
  }
  SocialNetwork net(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  // Only link to lexicographically later cells; add_edge mirrors the edge.
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto i = static_cast<CellIndex>(y * width + x);
      for (int dy = 0; dy <= moore_radius; ++dy) {
        const int ny = y + dy;
        if (ny >= height) break;
        for (int dx = -moore_radius; dx <= moore_radius; ++dx) {
          if (dy == 0 && dx <= 0) continue;
          const int nx = x + dx;
          if (nx < 0 || nx >= width) continue;
          net.add_edge(i, static_cast<CellIndex>(ny * width + nx));
        }
      }
    }
  }
  return net;
}

SocialNetwork add_teleconnections(SocialNetwork network, long n_tele, std::uint64_t seed) {
  if (n_tele < 0) throw ConfigError("n_tele must be non-negative");
  if (n_tele == 0) return network;
  const auto n = static_cast<unsigned long long>(network.size());
  const unsigned long long possible = n * (n - 1) / 2;
  const unsigned long long available = possible - network.edge_count();
  if (static_cast<unsigned long long>(n_tele) > available) {
    throw ConfigError("n_tele = " + std::to_string(n_tele) + " exceeds the " +
                      std::to_string(available) + " non-adjacent cell pairs");
  }
  Rng rng = make_rng(seed, Stream::kNetwork);
  std::uniform_int_distribution<CellIndex> pick(0, static_cast<CellIndex>(n - 1));
  long added = 0;
  while (added < n_tele) {
    const CellIndex a = pick(rng);
    const CellIndex b = pick(rng);
    if (network.add_edge(a, b)) ++added;
  }
  return network;
}

SocialNetwork build_network(int width, int height, const NetworkConfig& config) {
  return add_teleconnections(build_lattice(width, height, config.moore_radius),
                             config.n_teleconnections, config.seed);
}

double neighbour_intensity_fraction(const SocialNetwork& network,
                                    std::span<const double> intensities, CellIndex i,
                                    IntensityPredicate predicate) {
  const auto nbrs = network.neighbours(i);
  if (nbrs.empty()) {
    throw UndefinedFraction("cell " + std::to_string(i) + " has no neighbours");
  }
  std::size_t hits = 0;
  for (const CellIndex j : nbrs) {
    if (predicate(intensities[j])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(nbrs.size());
}

void write_edge_list_csv(std::ostream& out, const SocialNetwork& network) {
  out << "i,j\n";
  for (CellIndex i = 0; i < network.size(); ++i) {
    for (const CellIndex j : network.neighbours(i)) {
      if (i < j) out << i << ',' << j << '\n';
    }
  }
}

}  // namespace ablum
