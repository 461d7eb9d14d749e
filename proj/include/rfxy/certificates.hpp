#pragma once

#include <optional>
#include <string_view>

#include "rfxy/model.hpp"

namespace rfxy {

enum class Regime { kBelowDelta1, kAboveDelta2, kUncertified };
enum class CertifiedConfig { kAligned, kFieldAligned, kNone };

std::string_view to_string(Regime r) noexcept;
std::string_view to_string(CertifiedConfig c) noexcept;

struct Thresholds {
  double delta1;  ///< d eps / (2 - eps)
  double delta2;  ///< d (2 - eps) / eps
};

/// Disorder strengths below delta1 (above delta2) make the aligned
/// (field-aligned) configuration an eps-global minimiser. Requires
/// 0 < eps < 2; throws std::invalid_argument otherwise.
Thresholds epsilon_thresholds(int dim, double epsilon);

struct EpsCertificate {
  double epsilon;
  double delta;
  Regime regime;
  double delta1;
  double delta2;
  CertifiedConfig certified_config;
  /// Upper bound on (f(theta) - f_min) / |f_min| for the certified
  /// configuration. In the uncertified regime, (f_best - f_low) / |f_low|
  /// for the best known energy.
  double gap_bound;
};

/// Relative gap (f - f_low) / |f_low| of an energy against the lower bound.
/// Returns +inf when f_low is zero (delta = 0 on a zero-size bound).
double relative_gap(double energy, double f_low) noexcept;

/// Classifies an instance. `best_energy`, when given, tightens the
/// uncertified-regime bound together with the reference configurations.
EpsCertificate certify(const Instance& inst, double epsilon,
                       std::optional<double> best_energy = std::nullopt);

}  // namespace rfxy
