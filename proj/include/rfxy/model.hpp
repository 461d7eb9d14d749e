#pragma once

#include <cstdint>
#include <memory>
#include <numbers>

#include <Eigen/Core>

#include "rfxy/lattice.hpp"

namespace rfxy {

/// Angular configuration: one angle per site.
using Angles = Eigen::VectorXd;
/// Cartesian configuration: 2 x n_sites, one unit column per site. Also used
/// for tangent vectors and Euclidean derivatives, which share the shape.
using Spins = Eigen::Matrix2Xd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Unit-norm tolerance used when validating configurations.
inline constexpr double kUnitNormTolerance = 1e-6;

enum class Check { kValidate, kSkip };

/// One realisation of the random-field XY model: lattice, disorder strength
/// and frozen field orientations. Immutable; copies share the lattice.
class Instance {
 public:
  /// Angles are reduced to [0, 2pi). Throws std::invalid_argument for
  /// negative or non-finite delta and for a wrong number of angles.
  Instance(Lattice lattice, double delta, Angles field_angles,
           std::uint64_t disorder_seed);

  const Lattice& lattice() const noexcept { return *lattice_; }
  double delta() const noexcept { return delta_; }
  const Angles& field_angles() const noexcept { return field_angles_; }
  /// Columns h_i = (cos phi_i, sin phi_i).
  const Spins& field_vectors() const noexcept { return field_vectors_; }
  std::uint64_t disorder_seed() const noexcept { return seed_; }
  int num_sites() const noexcept { return lattice_->num_sites(); }

  /// Same field, different disorder strength.
  Instance with_delta(double delta) const;

 private:
  std::shared_ptr<const Lattice> lattice_;
  double delta_;
  Angles field_angles_;
  Spins field_vectors_;
  std::uint64_t seed_;
};

/// Draws phi_i ~ U[0, 2pi) i.i.d. from a stream seeded by `seed`.
Instance generate_disorder(const Lattice& lattice, double delta,
                           std::uint64_t seed);

Spins to_cartesian(const Angles& theta);
/// Angles in [0, 2pi).
Angles to_angles(const Spins& x);
/// Reduces an angle to [0, 2pi).
double wrap_angle(double a) noexcept;

/// Throws std::invalid_argument if any column deviates from unit norm by more
/// than `tol` or the shape does not match.
void validate_spins(const Spins& x, int num_sites,
                    double tol = kUnitNormTolerance);

/// The two terms of f = f1 + delta * f2.
struct EnergyTerms {
  double coupling;  ///< f1, in [-d L^d, d L^d]
  double field;     ///< f2, in [-L^d, L^d]
};

double energy_angular(const Angles& theta, const Instance& inst);
EnergyTerms energy_terms_angular(const Angles& theta, const Instance& inst);

/// Dot products only; no trigonometric calls.
double energy_cartesian(const Spins& x, const Instance& inst,
                        Check check = Check::kValidate);
EnergyTerms energy_terms_cartesian(const Spins& x, const Instance& inst,
                                   Check check = Check::kValidate);

/// f(y) - f(x), computed from the exact quadratic expansion
///   <D, grad f(x)> + 1/2 <D, H[D]>,  D = y - x,
/// so that small changes are resolved far below the rounding level of f
/// itself. `egrad_x` is the Euclidean gradient at x; `work` is scratch.
double energy_change(const Spins& x, const Spins& egrad_x, const Spins& y,
                     const Instance& inst, Spins& work);
double energy_change(const Spins& x, const Spins& y, const Instance& inst);
/// f(x + D) - f(x) for a displacement D given directly.
double energy_change_by(const Spins& d, const Spins& egrad_x, const Instance& inst);

/// Column i: -sum_{j in N(i)} x_j - delta h_i.
Spins euclidean_gradient(const Spins& x, const Instance& inst,
                         Check check = Check::kValidate);
void euclidean_gradient(const Spins& x, const Instance& inst, Spins& out);

/// Column i: -sum_{j in N(i)} v_j. Independent of the configuration; v need
/// not have unit columns.
Spins euclidean_hessian_vec(const Spins& v, const Instance& inst);
void euclidean_hessian_vec(const Spins& v, const Instance& inst, Spins& out);

/// Partial derivatives of the angular objective.
Angles gradient_angular(const Angles& theta, const Instance& inst);
/// Angular Hessian applied to a direction in angle space.
Angles hessian_vec_angular(const Angles& theta, const Angles& v,
                           const Instance& inst);

/// -(d + delta) L^d. No configuration has lower energy.
double lower_bound(const Instance& inst);

/// Ratio min f1 / min f2, which equals d.
inline double balanced_disorder(const Lattice& lattice) noexcept {
  return static_cast<double>(lattice.dim());
}

struct ReferenceConfigs {
  Angles aligned;        ///< all angles equal (to aligned_angle)
  Angles field_aligned;  ///< theta_i = phi_i
  double aligned_angle;
  double aligned_energy;
  double field_aligned_energy;
  double upper_bound;  ///< min of the two energies
};

/// Minimisers of f1 (constant angle 0) and of f2 (the field itself).
ReferenceConfigs reference_configs(const Instance& inst);

/// As reference_configs, but the constant angle of the aligned configuration
/// is the best of `scan_points` evenly spaced values in [0, 2pi).
ReferenceConfigs reference_configs_scanned(const Instance& inst,
                                           int scan_points = 360);

}  // namespace rfxy
