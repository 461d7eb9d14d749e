#include "rfxy/lattice.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace rfxy {

namespace {

int checked_site_count(int dim, int size) {
  if (dim < 1) {
    throw std::invalid_argument("lattice dimension must be >= 1, got " +
                                std::to_string(dim));
  }
  if (size < 2) {
    throw std::invalid_argument("lattice size must be >= 2, got " +
                                std::to_string(size));
  }
  std::int64_t n = 1;
  for (int k = 0; k < dim; ++k) {
    n *= size;
    if (n > std::numeric_limits<int>::max()) {
      throw std::invalid_argument("lattice too large: " + std::to_string(size) +
                                  "^" + std::to_string(dim) + " sites");
    }
  }
  return static_cast<int>(n);
}

}  // namespace

Lattice::Lattice(int dim, int size)
    : dim_(dim), size_(size), num_sites_(checked_site_count(dim, size)) {
  const int z = 2 * dim_;
  table_.resize(static_cast<std::size_t>(num_sites_) * z);

  std::vector<int> stride(dim_);
  int s = 1;
  for (int k = 0; k < dim_; ++k) {
    stride[k] = s;
    s *= size_;
  }

  for (int i = 0; i < num_sites_; ++i) {
    int* out = table_.data() + static_cast<std::size_t>(i) * z;
    for (int k = 0; k < dim_; ++k) {
      const int c = (i / stride[k]) % size_;
      const int base = i - c * stride[k];
      out[2 * k] = base + ((c + 1) % size_) * stride[k];
      out[2 * k + 1] = base + ((c + size_ - 1) % size_) * stride[k];
    }
  }
}

std::span<const int> Lattice::neighbors(int site) const {
  if (site < 0 || site >= num_sites_) {
    throw std::out_of_range("site index " + std::to_string(site) +
                            " outside [0, " + std::to_string(num_sites_) + ")");
  }
  return neighbors_unchecked(site);
}

std::vector<int> Lattice::coordinates(int site) const {
  if (site < 0 || site >= num_sites_) {
    throw std::out_of_range("site index " + std::to_string(site) +
                            " outside [0, " + std::to_string(num_sites_) + ")");
  }
  std::vector<int> c(dim_);
  for (int k = 0; k < dim_; ++k) {
    c[k] = site % size_;
    site /= size_;
  }
  return c;
}

int Lattice::index(std::span<const int> coords) const {
  if (static_cast<int>(coords.size()) != dim_) {
    throw std::invalid_argument("expected " + std::to_string(dim_) +
                                " coordinates, got " +
                                std::to_string(coords.size()));
  }
  int idx = 0;
  for (int k = dim_ - 1; k >= 0; --k) {
    if (coords[k] < 0 || coords[k] >= size_) {
      throw std::out_of_range("coordinate out of range along axis " +
                              std::to_string(k));
    }
    idx = idx * size_ + coords[k];
  }
  return idx;
}

}  // namespace rfxy
