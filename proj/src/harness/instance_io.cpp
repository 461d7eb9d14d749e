#include "rfxy/harness/instance_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace rfxy::harness {

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
    return r;
  }
  return v;
}

std::string header_line(const Instance& inst) {
  const Lattice& lat = inst.lattice();
  return fmt::format("d={} L={} delta={} seed={} n={}\n", lat.dim(), lat.size(),
                     inst.delta(), inst.disorder_seed(), lat.num_sites());
}

[[noreturn]] void bad_file(const std::string& why) {
  throw std::runtime_error("malformed instance file: " + why);
}

}  // namespace

void write_instance(const Instance& inst, std::ostream& out) {
  out << kInstanceMagic << ' ' << kInstanceFormatVersion << '\n'
      << header_line(inst);
  const Angles& phi = inst.field_angles();
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(phi[i]));
    char buf[8];
    std::memcpy(buf, &bits, sizeof buf);
    out.write(buf, sizeof buf);
  }
}

Instance read_instance(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) bad_file("missing magic line");
  {
    std::istringstream ss(line);
    std::string magic;
    int version = 0;
    if (!(ss >> magic >> version) || magic != kInstanceMagic) {
      bad_file("bad magic '" + line + "'");
    }
    if (version != kInstanceFormatVersion) {
      bad_file("unsupported format version " + std::to_string(version));
    }
  }
  if (!std::getline(in, line)) bad_file("missing header line");

  int d = 0, L = 0, n = -1;
  double delta = -1.0;
  std::uint64_t seed = 0;
  bool have_delta = false, have_seed = false;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) bad_file("header token '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    try {
      if (key == "d") d = std::stoi(val);
      else if (key == "L") L = std::stoi(val);
      else if (key == "n") n = std::stoi(val);
      else if (key == "delta") { delta = std::stod(val); have_delta = true; }
      else if (key == "seed") { seed = std::stoull(val); have_seed = true; }
      else bad_file("unknown header key '" + key + "'");
    } catch (const std::logic_error&) {
      bad_file("header value '" + tok + "'");
    }
  }
  if (!have_delta || !have_seed) bad_file("header lacks delta or seed");

  Lattice lat(d, L);
  if (n != lat.num_sites()) {
    bad_file("n=" + std::to_string(n) + " does not match L^d");
  }
  Angles phi(n);
  for (int i = 0; i < n; ++i) {
    char buf[8];
    if (!in.read(buf, sizeof buf)) bad_file("truncated angle data");
    std::uint64_t bits = 0;
    std::memcpy(&bits, buf, sizeof bits);
    phi[i] = std::bit_cast<double>(to_little_endian(bits));
  }
  return Instance(std::move(lat), delta, std::move(phi), seed);
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  p += ".json";
  return p;
}

nlohmann::json instance_to_json(const Instance& inst) {
  const Lattice& lat = inst.lattice();
  nlohmann::json j;
  j["format"] = kInstanceMagic;
  j["version"] = kInstanceFormatVersion;
  j["d"] = lat.dim();
  j["L"] = lat.size();
  j["delta"] = inst.delta();
  j["seed"] = inst.disorder_seed();
  j["n_sites"] = lat.num_sites();
  j["site_order"] = "row-major, axis 0 fastest";
  const Angles& phi = inst.field_angles();
  j["field_angles"] = std::vector<double>(phi.data(), phi.data() + phi.size());
  return j;
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write instance file " + path.string());
    write_instance(inst, out);
    if (!out) throw std::runtime_error("error writing " + path.string());
  }
  const auto side = sidecar_path(path);
  std::ofstream js(side, std::ios::trunc);
  if (!js) throw std::runtime_error("cannot write sidecar " + side.string());
  js << instance_to_json(inst).dump(1) << '\n';
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open instance file " + path.string());
  return read_instance(in);
}

}  // namespace rfxy::harness
