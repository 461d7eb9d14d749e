#include "rfxy/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace rfxy {

GridTooLarge::GridTooLarge(std::uint64_t estimate, std::uint64_t cap)
    : std::length_error("grid enumeration of " + std::to_string(estimate) +
                        " configurations exceeds the cap of " +
                        std::to_string(cap)),
      estimate_(estimate) {}

std::uint64_t grid_size(int k, int num_sites) noexcept {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  for (int i = 0; i < num_sites; ++i) {
    if (total > kMax / static_cast<std::uint64_t>(k)) return kMax;
    total *= static_cast<std::uint64_t>(k);
  }
  return total;
}

GridResult brute_force_grid(const Instance& inst, const GridSpec& spec) {
  if (spec.k < 1) throw std::invalid_argument("grid resolution k must be >= 1");
  const Lattice& lat = inst.lattice();
  const int n = lat.num_sites();
  const std::uint64_t total = grid_size(spec.k, n);
  if (total > spec.cap) throw GridTooLarge(total, spec.cap);

  const int k = spec.k;
  const double delta = inst.delta();
  const Angles& phi = inst.field_angles();

  // cos(2 pi (a - b) / k) depends only on (a - b) mod k.
  std::vector<double> pair_cos(k);
  for (int m = 0; m < k; ++m) pair_cos[m] = std::cos(kTwoPi * m / k);
  // Field energy of site i at grid value m: -delta cos(2 pi m / k - phi_i).
  std::vector<double> field(static_cast<std::size_t>(n) * k);
  for (int i = 0; i < n; ++i) {
    for (int m = 0; m < k; ++m) {
      field[static_cast<std::size_t>(i) * k + m] =
          -delta * std::cos(kTwoPi * m / k - phi[i]);
    }
  }
  auto coupling = [&](int a, int b) { return pair_cos[((a - b) % k + k) % k]; };

  std::vector<int> digits(n, 0);
  Angles theta = Angles::Zero(n);
  double energy = energy_angular(theta, inst);
  GridResult best;
  best.indices = digits;
  best.energy = energy;

  // Changing site i from a to b shifts the energy by
  //   -sum_{j in N(i)} [cos(b - t_j) - cos(a - t_j)] + field_i(b) - field_i(a)
  // (both ordered pairs (i,j) and (j,i) carry the 1/2 factor).
  auto set_site = [&](int i, int b) {
    const int a = digits[i];
    double d = field[static_cast<std::size_t>(i) * k + b] -
               field[static_cast<std::size_t>(i) * k + a];
    for (int j : lat.neighbors_unchecked(i)) {
      d -= coupling(b, digits[j]) - coupling(a, digits[j]);
    }
    digits[i] = b;
    energy += d;
  };

  std::uint64_t count = 1;
  for (;;) {
    int i = 0;
    while (i < n && digits[i] == k - 1) {
      set_site(i, 0);
      ++i;
    }
    if (i == n) break;
    set_site(i, digits[i] + 1);
    ++count;
    if (energy < best.energy) {
      best.energy = energy;
      best.indices = digits;
    }
  }

  best.evaluated = count;
  best.config.resize(n);
  for (int i = 0; i < n; ++i) best.config[i] = kTwoPi * best.indices[i] / k;
  best.energy = energy_angular(best.config, inst);
  return best;
}

LocalResult refine_from_grid(const Instance& inst, const Angles& grid_config,
                             const SolverOptions& opts) {
  return rtr(to_cartesian(grid_config), inst, opts);
}

}  // namespace rfxy
