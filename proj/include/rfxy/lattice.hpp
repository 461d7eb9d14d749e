#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rfxy {

/// Hypercubic lattice of linear size L in d dimensions with periodic
/// boundaries.
///
/// Sites are numbered row-major over axes with axis 0 varying fastest:
/// the site at 0-based coordinates (c_0, ..., c_{d-1}) has index
/// sum_k c_k * L^k. Each site stores exactly 2d neighbour entries in the
/// order (+axis0, -axis0, +axis1, -axis1, ...). For L = 2 the +1 and -1
/// neighbours along an axis coincide and the site is stored twice, so every
/// neighbour sum runs over exactly 2d terms.
///
/// Immutable after construction.
class Lattice {
 public:
  /// Throws std::invalid_argument for dim < 1, size < 2, or more sites than
  /// fit in a 32-bit index.
  Lattice(int dim, int size);

  int dim() const noexcept { return dim_; }
  int size() const noexcept { return size_; }
  int num_sites() const noexcept { return num_sites_; }
  int coordination() const noexcept { return 2 * dim_; }

  /// Neighbour multiset of site i. Throws std::out_of_range for a bad index.
  std::span<const int> neighbors(int site) const;

  /// Unchecked access for hot loops.
  std::span<const int> neighbors_unchecked(int site) const noexcept {
    const auto z = static_cast<std::size_t>(2 * dim_);
    return {table_.data() + static_cast<std::size_t>(site) * z, z};
  }

  /// Flat (num_sites x 2d) neighbour table.
  std::span<const int> neighbor_table() const noexcept { return table_; }

  std::vector<int> coordinates(int site) const;
  int index(std::span<const int> coords) const;

  friend bool operator==(const Lattice& a, const Lattice& b) noexcept {
    return a.dim_ == b.dim_ && a.size_ == b.size_;
  }

 private:
  int dim_;
  int size_;
  int num_sites_;
  std::vector<int> table_;
};

inline Lattice build_lattice(int dim, int size) { return Lattice(dim, size); }

}  // namespace rfxy
