#pragma once

#include <cstdint>
#include <stdexcept>

#include "rfxy/local_solvers.hpp"
#include "rfxy/model.hpp"

namespace rfxy {

/// Angular grid {2 pi m / k : m = 0..k-1} per site.
struct GridSpec {
  int k = 8;
  /// Largest k^n_sites the enumeration accepts.
  std::uint64_t cap = 10'000'000;
};

/// Thrown when k^n_sites exceeds the cap. `estimate` saturates at UINT64_MAX.
class GridTooLarge : public std::length_error {
 public:
  GridTooLarge(std::uint64_t estimate, std::uint64_t cap);
  std::uint64_t estimate() const noexcept { return estimate_; }

 private:
  std::uint64_t estimate_;
};

struct GridResult {
  Angles config;
  /// Grid index m_i of each site.
  std::vector<int> indices;
  double energy = 0.0;
  std::uint64_t evaluated = 0;
};

/// k^n_sites, saturating.
std::uint64_t grid_size(int k, int num_sites) noexcept;

/// Exhaustive minimum of the energy over the grid. Site 0 is the fastest
/// digit of the enumeration; among equal energies the first configuration in
/// that order wins. Energies are updated incrementally per changed site and
/// the winner is re-evaluated exactly.
GridResult brute_force_grid(const Instance& inst, const GridSpec& spec);

/// RTR started from a grid configuration.
LocalResult refine_from_grid(const Instance& inst, const Angles& grid_config,
                             const SolverOptions& opts = {});

}  // namespace rfxy
