#pragma once

#include <cstdint>

#include "rfxy/model.hpp"

namespace rfxy {

// Geometry of the product of circles S^1 x ... x S^1, embedded columnwise in
// 2 x n matrices with the Frobenius metric. Tangent vectors at X are plain
// Spins matrices V with x_i . v_i = 0 for every column; the base point is
// whatever configuration the caller pairs them with.

/// Per-column tolerance used by is_tangent in checked mode.
inline constexpr double kTangentTolerance = 1e-6;

/// Column i: u_i - (x_i . u_i) x_i.
Spins project_tangent(const Spins& x, const Spins& u);
void project_tangent_inplace(const Spins& x, Spins& u) noexcept;

/// True if every column satisfies |x_i . v_i| <= tol (1 + |v_i|).
bool is_tangent(const Spins& x, const Spins& v, double tol = kTangentTolerance);

/// Metric-projection retraction: column i is (x_i + v_i) / |x_i + v_i|.
Spins retract(const Spins& x, const Spins& v);
void retract(const Spins& x, const Spins& v, Spins& out);

/// Retraction that also returns the displacement D = R(x, v) - x, formed
/// without cancellation: d_i = v_i / r_i - x_i |v_i|^2 / (r_i (1 + r_i)) with
/// r_i = |x_i + v_i|. Requires v tangent at x.
void retract_displacement(const Spins& x, const Spins& v, Spins& out, Spins& d);

/// Exponential map (exact rotation on each circle). Not used by the solvers.
Spins exp_map(const Spins& x, const Spins& v);

/// Projection of the Euclidean gradient onto the tangent space.
Spins riemannian_gradient(const Spins& x, const Instance& inst,
                          Check check = Check::kValidate);

/// Column i: Proj_{x_i}(H[V]_i) - (x_i . egrad_i) v_i. Self-adjoint on the
/// tangent space. In checked mode V must be tangent at X.
Spins riemannian_hessian_vec(const Spins& x, const Spins& v,
                             const Instance& inst,
                             Check check = Check::kValidate);

/// Hot-loop form with the Euclidean gradient at X precomputed. `out` must not
/// alias `v`.
void riemannian_hessian_vec(const Spins& x, const Spins& egrad, const Spins& v,
                            const Instance& inst, Spins& out);

/// Transport of a tangent vector to the tangent space at `to` by projection.
inline Spins transport(const Spins& to, const Spins& v) {
  return project_tangent(to, v);
}

/// Columns i.i.d. uniform on the circle; angles drawn from a stream seeded
/// by `seed` (independent of the disorder stream for the same seed).
Spins random_point(const Lattice& lattice, std::uint64_t seed);
Spins random_point(int num_sites, std::uint64_t seed);

/// Frobenius inner product sum_i u_i . v_i.
double inner(const Spins& u, const Spins& v);
double norm(const Spins& v);

}  // namespace rfxy
