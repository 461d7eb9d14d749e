#include "rfxy/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rfxy {

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::kBelowDelta1: return "below_delta1";
    case Regime::kAboveDelta2: return "above_delta2";
    case Regime::kUncertified: return "uncertified";
  }
  return "unknown";
}

std::string_view to_string(CertifiedConfig c) noexcept {
  switch (c) {
    case CertifiedConfig::kAligned: return "aligned";
    case CertifiedConfig::kFieldAligned: return "field_aligned";
    case CertifiedConfig::kNone: return "none";
  }
  return "unknown";
}

Thresholds epsilon_thresholds(int dim, double epsilon) {
  if (dim < 1) {
    throw std::invalid_argument("dimension must be >= 1");
  }
  if (!(epsilon > 0.0 && epsilon < 2.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 2)");
  }
  const double d = dim;
  return {d * epsilon / (2.0 - epsilon), d * (2.0 - epsilon) / epsilon};
}

double relative_gap(double energy, double f_low) noexcept {
  if (f_low == 0.0) return std::numeric_limits<double>::infinity();
  return (energy - f_low) / std::abs(f_low);
}

EpsCertificate certify(const Instance& inst, double epsilon,
                       std::optional<double> best_energy) {
  const int dim = inst.lattice().dim();
  const Thresholds t = epsilon_thresholds(dim, epsilon);
  const double delta = inst.delta();
  const double d = dim;

  EpsCertificate c{};
  c.epsilon = epsilon;
  c.delta = delta;
  c.delta1 = t.delta1;
  c.delta2 = t.delta2;

  if (delta > 0.0 && delta < t.delta1) {
    c.regime = Regime::kBelowDelta1;
    c.certified_config = CertifiedConfig::kAligned;
    c.gap_bound = 2.0 * delta / (d + delta);
  } else if (delta > t.delta2) {
    c.regime = Regime::kAboveDelta2;
    c.certified_config = CertifiedConfig::kFieldAligned;
    c.gap_bound = 2.0 * d / (d + delta);
  } else {
    c.regime = Regime::kUncertified;
    c.certified_config = CertifiedConfig::kNone;
    double upper = reference_configs(inst).upper_bound;
    if (best_energy) upper = std::min(upper, *best_energy);
    c.gap_bound = relative_gap(upper, lower_bound(inst));
  }
  return c;
}

}  // namespace rfxy
