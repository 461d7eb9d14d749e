#include "rfxy/local_solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rfxy/manifold.hpp"

namespace rfxy {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Raw Frobenius inner product without shape checks.
double dot(const Spins& a, const Spins& b) noexcept {
  const Eigen::Index n = 2 * a.cols();
  const double* p = a.data();
  const double* q = b.data();
  double s = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) s += p[k] * q[k];
  return s;
}

/// Energy, Euclidean and Riemannian gradient at one point.
struct PointState {
  Spins x;
  Spins egrad;
  Spins grad;
  double f = 0.0;
  double grad_norm = 0.0;

  void evaluate(const Instance& inst, LocalResult& r) {
    f = energy_cartesian(x, inst, Check::kSkip);
    ++r.cost_evals;
    refresh_gradient(inst, r);
  }

  void refresh_gradient(const Instance& inst, LocalResult& r) {
    euclidean_gradient(x, inst, egrad);
    grad = egrad;
    project_tangent_inplace(x, grad);
    grad_norm = std::sqrt(dot(grad, grad));
    ++r.grad_evals;
  }

  bool finite() const noexcept {
    return std::isfinite(f) && std::isfinite(grad_norm);
  }
};

void check_iterate(const SolverOptions& opts, const Spins& x, int n) {
  if (opts.checked) validate_spins(x, n, 1e-10);
}

// The tracked energy accumulates exact per-step changes; the reported one is
// re-evaluated from the final configuration.
void finish(LocalResult& r, const PointState& s, const Instance& inst,
            Clock::time_point t0) {
  r.config = s.x;
  r.energy = energy_cartesian(s.x, inst, Check::kSkip);
  r.grad_norm = s.grad_norm;
  r.wall_time = seconds_since(t0);
}

struct TcgOutput {
  Spins eta;
  Spins heta;
  bool hit_boundary = false;
  bool negative_curvature = false;
  int inner_iterations = 0;
};

/// Steihaug-Toint truncated CG on the trust-region subproblem
///   min_eta  <grad, eta> + 1/2 <eta, Hess[eta]>  s.t. |eta| <= radius.
void truncated_cg(const PointState& s, const Instance& inst, double radius,
                  const SolverOptions& opts, int max_inner, TcgOutput& out,
                  LocalResult& r, Spins& r_vec, Spins& delta, Spins& hdelta) {
  const Eigen::Index n = s.x.cols();
  out.eta.setZero(2, n);
  out.heta.setZero(2, n);
  out.hit_boundary = false;
  out.negative_curvature = false;

  r_vec = s.grad;
  double r_r = dot(r_vec, r_vec);
  const double norm_r0 = std::sqrt(r_r);
  delta = -r_vec;

  double e_pe = 0.0;  // <eta, eta>
  double e_pd = 0.0;  // <eta, delta>
  double d_pd = r_r;  // <delta, delta>
  double model = 0.0;
  const double radius2 = radius * radius;
  const double stop_tol =
      norm_r0 * std::min(std::pow(norm_r0, opts.tcg_theta), opts.tcg_kappa);

  int j = 0;
  for (; j < max_inner; ++j) {
    riemannian_hessian_vec(s.x, s.egrad, delta, inst, hdelta);
    ++r.hess_evals;
    const double d_hd = dot(delta, hdelta);
    const double alpha = r_r / d_hd;
    const double e_pe_new = e_pe + 2.0 * alpha * e_pd + alpha * alpha * d_pd;

    if (d_hd <= 0.0 || e_pe_new >= radius2) {
      const double tau =
          (-e_pd + std::sqrt(e_pd * e_pd + d_pd * (radius2 - e_pe))) / d_pd;
      out.eta += tau * delta;
      out.heta += tau * hdelta;
      out.hit_boundary = true;
      out.negative_curvature = d_hd <= 0.0;
      ++j;
      break;
    }

    // Candidate update; stop if the model would not decrease.
    const double new_model =
        model + alpha * dot(delta, s.grad) +
        0.5 * (2.0 * alpha * dot(out.eta, hdelta) + alpha * alpha * d_hd);
    if (new_model >= model) {
      ++j;
      break;
    }
    e_pe = e_pe_new;
    out.eta += alpha * delta;
    out.heta += alpha * hdelta;
    model = new_model;

    r_vec += alpha * hdelta;
    const double r_r_old = r_r;
    r_r = dot(r_vec, r_vec);
    if (std::sqrt(r_r) <= stop_tol) {
      ++j;
      break;
    }

    const double beta = r_r / r_r_old;
    delta = -r_vec + beta * delta;
    // Keep the search direction on the tangent space despite rounding.
    project_tangent_inplace(s.x, delta);
    e_pd = beta * (e_pd + alpha * d_pd);
    d_pd = r_r + beta * beta * d_pd;
  }
  out.inner_iterations = j;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (tr_max_radius > 0.0 && tr_initial_radius > tr_max_radius) {
    throw std::invalid_argument("tr_initial_radius must not exceed tr_max_radius");
  }
  if (!(tcg_kappa > 0.0 && tcg_kappa < 1.0)) {
    throw std::invalid_argument("tcg_kappa must lie in (0, 1)");
  }
  if (!(tcg_theta > 0.0)) throw std::invalid_argument("tcg_theta must be > 0");
  if (!(tr_accept_ratio >= 0.0 && tr_accept_ratio < tr_expand_ratio &&
        tr_expand_ratio < 1.0)) {
    throw std::invalid_argument("trust-region ratios must satisfy 0 <= accept < expand < 1");
  }
  if (!(tr_shrink_ratio > 0.0 && tr_shrink_ratio < 1.0)) {
    throw std::invalid_argument("tr_shrink_ratio must lie in (0, 1)");
  }
  if (tr_max_rejections < 1) {
    throw std::invalid_argument("tr_max_rejections must be >= 1");
  }
  const auto& ls = line_search;
  if (!(ls.sufficient_decrease > 0.0 && ls.sufficient_decrease < 1.0)) {
    throw std::invalid_argument("Armijo constant must lie in (0, 1)");
  }
  if (!(ls.contraction > 0.0 && ls.contraction < 1.0)) {
    throw std::invalid_argument("backtracking factor must lie in (0, 1)");
  }
  if (!(ls.initial_step > 0.0)) {
    throw std::invalid_argument("initial step must be > 0");
  }
  if (ls.max_backtracks < 1) {
    throw std::invalid_argument("max_backtracks must be >= 1");
  }
}

double SolverOptions::max_radius(int num_sites) const {
  return tr_max_radius > 0.0 ? tr_max_radius
                             : std::sqrt(static_cast<double>(num_sites));
}

double SolverOptions::initial_radius(int num_sites) const {
  return tr_initial_radius > 0.0 ? tr_initial_radius
                                 : max_radius(num_sites) / 8.0;
}

std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::kConverged: return "converged";
    case Status::kIterationLimit: return "iteration_limit";
    case Status::kStalled: return "stalled";
    case Status::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

std::string_view to_string(LocalSolverKind k) noexcept {
  return k == LocalSolverKind::kRtr ? "rtr" : "rcg";
}

LocalSolverKind parse_local_solver(std::string_view name) {
  if (name == "rtr") return LocalSolverKind::kRtr;
  if (name == "rcg") return LocalSolverKind::kRcg;
  throw std::invalid_argument("unknown local solver '" + std::string(name) +
                              "' (expected rtr or rcg)");
}

LocalSolverFn make_local_solver(LocalSolverKind kind) {
  if (kind == LocalSolverKind::kRtr) {
    return [](const Spins& x, const Instance& inst, const SolverOptions& o) {
      return rtr(x, inst, o);
    };
  }
  return [](const Spins& x, const Instance& inst, const SolverOptions& o) {
    return rcg(x, inst, o);
  };
}

LocalResult rtr(const Spins& x0, const Instance& inst, const SolverOptions& opts,
                const IterateObserver& observer) {
  opts.validate();
  const int n = inst.num_sites();
  validate_spins(x0, n);
  const auto t0 = Clock::now();

  LocalResult r;
  PointState cur;
  cur.x = x0;
  cur.evaluate(inst, r);
  if (!cur.finite()) {
    r.status = Status::kNumericalFailure;
    finish(r, cur, inst, t0);
    return r;
  }
  if (observer) observer(0, cur.f, cur.x);

  const double max_radius = opts.max_radius(n);
  double radius = opts.initial_radius(n);
  const int max_inner = opts.tcg_max_inner > 0 ? opts.tcg_max_inner : n;

  TcgOutput step;
  Spins r_vec, delta, hdelta, x_prop, work;
  int rejections = 0;

  for (;;) {
    if (cur.grad_norm <= opts.grad_tol) {
      r.status = Status::kConverged;
      break;
    }
    if (r.iterations >= opts.max_iters) {
      r.status = Status::kIterationLimit;
      break;
    }
    if (rejections >= opts.tr_max_rejections) {
      r.status = Status::kStalled;
      break;
    }
    ++r.iterations;

    truncated_cg(cur, inst, radius, opts, max_inner, step, r, r_vec, delta,
                 hdelta);
    if (step.negative_curvature) ++r.negative_curvature_exits;

    retract_displacement(cur.x, step.eta, x_prop, work);
    const double df = energy_change_by(work, cur.egrad, inst);
    ++r.cost_evals;

    const double rho_num = -df;
    const double rho_den = -dot(cur.grad, step.eta) - 0.5 * dot(step.eta, step.heta);
    const double rho = rho_num / rho_den;
    const bool model_decreased = rho_den >= 0.0;

    if (!std::isfinite(rho) || !model_decreased || rho < opts.tr_shrink_ratio) {
      radius *= opts.tr_shrink_ratio;
    } else if (rho > opts.tr_expand_ratio && step.hit_boundary) {
      radius = std::min(2.0 * radius, max_radius);
    }

    const bool accept = std::isfinite(df) && model_decreased &&
                        rho > opts.tr_accept_ratio && df <= 0.0;
    if (!accept) {
      ++rejections;
      continue;
    }
    rejections = 0;
    std::swap(cur.x, x_prop);
    cur.f += df;
    cur.refresh_gradient(inst, r);
    check_iterate(opts, cur.x, n);
    if (!cur.finite()) {
      r.status = Status::kNumericalFailure;
      break;
    }
    if (observer) observer(r.iterations, cur.f, cur.x);
  }

  finish(r, cur, inst, t0);
  return r;
}

LocalResult rcg(const Spins& x0, const Instance& inst, const SolverOptions& opts,
                const IterateObserver& observer) {
  opts.validate();
  const int n = inst.num_sites();
  validate_spins(x0, n);
  const auto t0 = Clock::now();
  const LineSearchOptions& ls = opts.line_search;

  LocalResult r;
  PointState cur;
  cur.x = x0;
  cur.evaluate(inst, r);
  if (!cur.finite()) {
    r.status = Status::kNumericalFailure;
    finish(r, cur, inst, t0);
    return r;
  }
  if (observer) observer(0, cur.f, cur.x);

  Spins dir = -cur.grad;
  bool steepest = true;
  double prev_alpha = 0.0;
  double prev_decrease = 0.0;
  Spins x_trial, step, old_grad, work;

  for (;;) {
    if (cur.grad_norm <= opts.grad_tol) {
      r.status = Status::kConverged;
      break;
    }
    if (r.iterations >= opts.max_iters) {
      r.status = Status::kIterationLimit;
      break;
    }
    ++r.iterations;

    double df0 = dot(cur.grad, dir);
    if (!(df0 < 0.0)) {
      dir = -cur.grad;
      steepest = true;
      df0 = -cur.grad_norm * cur.grad_norm;
    }
    const double dir_norm = std::sqrt(dot(dir, dir));

    // First trial: the step a quadratic through the previous decrease
    // would take, else twice the previous step.
    double alpha = ls.initial_step / dir_norm;
    if (prev_alpha > 0.0) {
      const double guess = 2.2 * prev_decrease / -df0;
      alpha = guess > 0.0 && std::isfinite(guess) ? guess : 2.0 * prev_alpha;
    }

    double df_trial = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int b = 0; b < ls.max_backtracks; ++b) {
      step = alpha * dir;
      retract_displacement(cur.x, step, x_trial, work);
      df_trial = energy_change_by(work, cur.egrad, inst);
      ++r.cost_evals;
      if (std::isfinite(df_trial) &&
          df_trial <= ls.sufficient_decrease * alpha * df0) {
        found = true;
        break;
      }
      alpha *= ls.contraction;
    }

    if (!found || !(df_trial <= 0.0)) {
      if (steepest) {
        r.status = Status::kStalled;
        break;
      }
      dir = -cur.grad;
      steepest = true;
      continue;
    }

    prev_alpha = alpha;
    prev_decrease = -df_trial;
    old_grad = cur.grad;
    std::swap(cur.x, x_trial);
    cur.f += df_trial;
    cur.refresh_gradient(inst, r);
    check_iterate(opts, cur.x, n);
    if (!cur.finite()) {
      r.status = Status::kNumericalFailure;
      break;
    }
    if (observer) observer(r.iterations, cur.f, cur.x);

    project_tangent_inplace(cur.x, old_grad);
    project_tangent_inplace(cur.x, dir);
    const double old_gg = dot(old_grad, old_grad);
    double beta = 0.0;
    switch (opts.cg_beta_rule) {
      case CgBetaRule::kPolakRibierePlus: {
        const double num = dot(cur.grad, cur.grad) - dot(cur.grad, old_grad);
        beta = old_gg > 0.0 ? std::max(0.0, num / old_gg) : 0.0;
        break;
      }
      case CgBetaRule::kFletcherReeves:
        beta = old_gg > 0.0 ? dot(cur.grad, cur.grad) / old_gg : 0.0;
        break;
      case CgBetaRule::kHestenesStiefel: {
        const double num = dot(cur.grad, cur.grad) - dot(cur.grad, old_grad);
        const double den = dot(dir, cur.grad) - dot(dir, old_grad);
        beta = den != 0.0 ? std::max(0.0, num / den) : 0.0;
        break;
      }
    }
    dir = -cur.grad + beta * dir;
    steepest = beta == 0.0;
  }

  finish(r, cur, inst, t0);
  return r;
}

}  // namespace rfxy
