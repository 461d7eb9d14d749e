#pragma once

#include <cstdint>
#include <random>

namespace rfxy {

using Rng = std::mt19937_64;

/// Independent random streams derived from one master seed. Changing how
/// many draws one stream consumes never shifts another.
enum class Stream : std::uint64_t {
  kDisorder = 1,
  kStarts = 2,
  kPerturbations = 3,
  kLocalCompare = 4,
};

/// splitmix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for the `index`-th substream (e.g. one per run) of `stream`.
constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                    std::uint64_t index = 0,
                                    std::uint64_t sub = 0) noexcept {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ static_cast<std::uint64_t>(stream));
  h = mix64(h ^ index);
  return mix64(h ^ sub);
}

}  // namespace rfxy
