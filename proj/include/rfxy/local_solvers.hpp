#pragma once

#include <functional>
#include <string_view>

#include "rfxy/model.hpp"

namespace rfxy {

enum class CgBetaRule { kPolakRibierePlus, kFletcherReeves, kHestenesStiefel };

struct LineSearchOptions {
  double sufficient_decrease = 1e-4;  ///< Armijo constant
  double contraction = 0.5;           ///< backtracking factor
  double initial_step = 1.0;          ///< first trial step length (norm of the step)
  int max_backtracks = 30;
};

struct SolverOptions {
  double grad_tol = 1e-6;
  int max_iters = 10000;
  /// Trust-region radii; values <= 0 select sqrt(n_sites) for the maximum and
  /// max/8 for the initial radius.
  double tr_initial_radius = 0.0;
  double tr_max_radius = 0.0;
  double tr_accept_ratio = 0.1;
  double tr_expand_ratio = 0.75;
  double tr_shrink_ratio = 0.25;
  double tcg_kappa = 0.1;
  double tcg_theta = 1.0;
  /// Inner truncated-CG iteration cap; <= 0 means the manifold dimension.
  int tcg_max_inner = 0;
  /// Consecutive rejected trust-region steps before giving up as stalled.
  int tr_max_rejections = 40;
  CgBetaRule cg_beta_rule = CgBetaRule::kPolakRibierePlus;
  LineSearchOptions line_search;
  /// Validate feasibility of every iterate (slow).
  bool checked = false;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
  double max_radius(int num_sites) const;
  double initial_radius(int num_sites) const;
};

enum class Status { kConverged, kIterationLimit, kStalled, kNumericalFailure };
std::string_view to_string(Status s) noexcept;

struct LocalResult {
  Spins config;
  double energy = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  long cost_evals = 0;
  long grad_evals = 0;
  long hess_evals = 0;
  /// Truncated-CG exits on non-positive curvature (RTR only).
  int negative_curvature_exits = 0;
  double wall_time = 0.0;
  Status status = Status::kStalled;

  bool ok() const noexcept { return status != Status::kNumericalFailure; }
};

/// Observer of accepted iterates: (iteration, energy, configuration).
using IterateObserver =
    std::function<void(int iteration, double energy, const Spins& x)>;

/// Riemannian trust-region method with a Steihaug-Toint truncated-CG
/// subproblem solver and the exact Riemannian Hessian. Throws
/// std::invalid_argument if x0 is not on the manifold.
LocalResult rtr(const Spins& x0, const Instance& inst, const SolverOptions& opts,
                const IterateObserver& observer = {});

/// Riemannian conjugate gradient with Armijo backtracking along the
/// retracted ray, projection transport, and restarts to steepest descent
/// whenever the direction is not a descent direction.
LocalResult rcg(const Spins& x0, const Instance& inst, const SolverOptions& opts,
                const IterateObserver& observer = {});

enum class LocalSolverKind { kRtr, kRcg };
std::string_view to_string(LocalSolverKind k) noexcept;
LocalSolverKind parse_local_solver(std::string_view name);

using LocalSolverFn =
    std::function<LocalResult(const Spins&, const Instance&, const SolverOptions&)>;

LocalSolverFn make_local_solver(LocalSolverKind kind);

}  // namespace rfxy
