#include "rfxy/manifold.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rfxy/rng.hpp"

namespace rfxy {

namespace {

void require_same_shape(const Spins& a, const Spins& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("shape mismatch: " + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.cols()) + " columns");
  }
}

}  // namespace

void project_tangent_inplace(const Spins& x, Spins& u) noexcept {
  const Eigen::Index n = x.cols();
  const double* xd = x.data();
  double* ud = u.data();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = xd[2 * i] * ud[2 * i] + xd[2 * i + 1] * ud[2 * i + 1];
    ud[2 * i] -= a * xd[2 * i];
    ud[2 * i + 1] -= a * xd[2 * i + 1];
  }
}

Spins project_tangent(const Spins& x, const Spins& u) {
  require_same_shape(x, u);
  Spins out = u;
  project_tangent_inplace(x, out);
  return out;
}

bool is_tangent(const Spins& x, const Spins& v, double tol) {
  if (x.cols() != v.cols()) return false;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    if (std::abs(x.col(i).dot(v.col(i))) > tol * (1.0 + v.col(i).norm())) {
      return false;
    }
  }
  return true;
}

void retract(const Spins& x, const Spins& v, Spins& out) {
  const Eigen::Index n = x.cols();
  out.resize(2, n);
  const double* xd = x.data();
  const double* vd = v.data();
  double* od = out.data();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = xd[2 * i] + vd[2 * i];
    const double b = xd[2 * i + 1] + vd[2 * i + 1];
    const double r = std::hypot(a, b);
    // |x_i + v_i|^2 = 1 + |v_i|^2 for tangent v_i
    assert(r > 0.0);
    od[2 * i] = a / r;
    od[2 * i + 1] = b / r;
  }
}

Spins retract(const Spins& x, const Spins& v) {
  require_same_shape(x, v);
  Spins out;
  retract(x, v, out);
  return out;
}

void retract_displacement(const Spins& x, const Spins& v, Spins& out, Spins& d) {
  const Eigen::Index n = x.cols();
  out.resize(2, n);
  d.resize(2, n);
  const double* xd = x.data();
  const double* vd = v.data();
  double* od = out.data();
  double* dd = d.data();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x0 = xd[2 * i], x1 = xd[2 * i + 1];
    const double v0 = vd[2 * i], v1 = vd[2 * i + 1];
    const double r = std::hypot(x0 + v0, x1 + v1);
    assert(r > 0.0);
    od[2 * i] = (x0 + v0) / r;
    od[2 * i + 1] = (x1 + v1) / r;
    // r - 1 = (|v|^2 + 2 x.v) / (r + 1) when |x| = 1
    const double rm1 = (v0 * v0 + v1 * v1 + 2.0 * (x0 * v0 + x1 * v1)) / (r + 1.0);
    dd[2 * i] = (v0 - x0 * rm1) / r;
    dd[2 * i + 1] = (v1 - x1 * rm1) / r;
  }
}

Spins exp_map(const Spins& x, const Spins& v) {
  require_same_shape(x, v);
  Spins out(2, x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const double t = v.col(i).norm();
    if (t == 0.0) {
      out.col(i) = x.col(i);
    } else {
      out.col(i) = std::cos(t) * x.col(i) + (std::sin(t) / t) * v.col(i);
    }
  }
  return out;
}

Spins riemannian_gradient(const Spins& x, const Instance& inst, Check check) {
  Spins g = euclidean_gradient(x, inst, check);
  project_tangent_inplace(x, g);
  return g;
}

void riemannian_hessian_vec(const Spins& x, const Spins& egrad, const Spins& v,
                            const Instance& inst, Spins& out) {
  euclidean_hessian_vec(v, inst, out);
  const Eigen::Index n = x.cols();
  const double* xd = x.data();
  const double* gd = egrad.data();
  const double* vd = v.data();
  double* od = out.data();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x0 = xd[2 * i];
    const double x1 = xd[2 * i + 1];
    const double a = x0 * od[2 * i] + x1 * od[2 * i + 1];
    const double curv = x0 * gd[2 * i] + x1 * gd[2 * i + 1];
    od[2 * i] = od[2 * i] - a * x0 - curv * vd[2 * i];
    od[2 * i + 1] = od[2 * i + 1] - a * x1 - curv * vd[2 * i + 1];
  }
}

Spins riemannian_hessian_vec(const Spins& x, const Spins& v,
                             const Instance& inst, Check check) {
  require_same_shape(x, v);
  if (check == Check::kValidate) {
    validate_spins(x, inst.num_sites());
    if (!is_tangent(x, v)) {
      throw std::invalid_argument("direction is not tangent at the base point");
    }
  }
  Spins egrad;
  euclidean_gradient(x, inst, egrad);
  Spins out;
  riemannian_hessian_vec(x, egrad, v, inst, out);
  return out;
}

Spins random_point(int num_sites, std::uint64_t seed) {
  Rng rng(derive_seed(seed, Stream::kStarts));
  Angles theta(num_sites);
  for (int i = 0; i < num_sites; ++i) {
    theta[i] = static_cast<double>(rng() >> 11) * 0x1.0p-53 * kTwoPi;
  }
  return to_cartesian(theta);
}

Spins random_point(const Lattice& lattice, std::uint64_t seed) {
  return random_point(lattice.num_sites(), seed);
}

double inner(const Spins& u, const Spins& v) {
  require_same_shape(u, v);
  const Eigen::Index n = 2 * u.cols();
  const double* a = u.data();
  const double* b = v.data();
  double s = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

double norm(const Spins& v) { return std::sqrt(inner(v, v)); }

}  // namespace rfxy
