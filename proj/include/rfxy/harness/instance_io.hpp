#pragma once

#include <filesystem>
#include <iosfwd>

#include <nlohmann/json.hpp>

#include "rfxy/model.hpp"

namespace rfxy::harness {

// Instance file layout (version 1):
//
//   RFXY-INSTANCE 1\n
//   d=<int> L=<int> delta=<decimal> seed=<uint64> n=<int>\n
//   <n little-endian IEEE-754 float64 field angles, site order>
//
// delta is written in shortest round-trip decimal form. A JSON sidecar with
// the same content is written next to the binary file as <path>.json.

inline constexpr const char* kInstanceMagic = "RFXY-INSTANCE";
inline constexpr int kInstanceFormatVersion = 1;

void write_instance(const Instance& inst, std::ostream& out);
Instance read_instance(std::istream& in);

/// Writes the binary file and its JSON sidecar. Throws std::runtime_error if
/// either cannot be written.
void save_instance(const Instance& inst, const std::filesystem::path& path);
/// Reads the binary file (the sidecar is not needed).
Instance load_instance(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);
nlohmann::json instance_to_json(const Instance& inst);

}  // namespace rfxy::harness
