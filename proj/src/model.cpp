#include "rfxy/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rfxy/rng.hpp"

namespace rfxy {

namespace {

void require_angles(const Angles& theta, const Instance& inst) {
  if (theta.size() != inst.num_sites()) {
    throw std::invalid_argument(
        "angular configuration has " + std::to_string(theta.size()) +
        " entries, instance has " + std::to_string(inst.num_sites()) + " sites");
  }
}

void require_shape(const Spins& m, const Instance& inst, const char* what) {
  if (m.cols() != inst.num_sites()) {
    throw std::invalid_argument(std::string(what) + " has " +
                                std::to_string(m.cols()) + " columns, instance has " +
                                std::to_string(inst.num_sites()) + " sites");
  }
}

/// Uniform double in [0, 1) from the top 53 bits.
double unit_uniform(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Instance::Instance(Lattice lattice, double delta, Angles field_angles,
                   std::uint64_t disorder_seed)
    : lattice_(std::make_shared<const Lattice>(std::move(lattice))),
      delta_(delta),
      field_angles_(std::move(field_angles)),
      seed_(disorder_seed) {
  if (!std::isfinite(delta_) || delta_ < 0.0) {
    throw std::invalid_argument("disorder strength must be finite and >= 0");
  }
  if (field_angles_.size() != lattice_->num_sites()) {
    throw std::invalid_argument("expected " +
                                std::to_string(lattice_->num_sites()) +
                                " field angles, got " +
                                std::to_string(field_angles_.size()));
  }
  for (Eigen::Index i = 0; i < field_angles_.size(); ++i) {
    if (!std::isfinite(field_angles_[i])) {
      throw std::invalid_argument("field angle " + std::to_string(i) +
                                  " is not finite");
    }
    field_angles_[i] = wrap_angle(field_angles_[i]);
  }
  field_vectors_ = to_cartesian(field_angles_);
}

Instance Instance::with_delta(double delta) const {
  Instance copy = *this;
  if (!std::isfinite(delta) || delta < 0.0) {
    throw std::invalid_argument("disorder strength must be finite and >= 0");
  }
  copy.delta_ = delta;
  return copy;
}

Instance generate_disorder(const Lattice& lattice, double delta,
                           std::uint64_t seed) {
  Rng rng(derive_seed(seed, Stream::kDisorder));
  Angles phi(lattice.num_sites());
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    phi[i] = unit_uniform(rng) * kTwoPi;
  }
  return Instance(lattice, delta, std::move(phi), seed);
}

double wrap_angle(double a) noexcept {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative can round back up to exactly 2pi
  if (r >= kTwoPi) r = 0.0;
  return r;
}

Spins to_cartesian(const Angles& theta) {
  Spins x(2, theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    x(0, i) = std::cos(theta[i]);
    x(1, i) = std::sin(theta[i]);
  }
  return x;
}

Angles to_angles(const Spins& x) {
  Angles theta(x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    theta[i] = wrap_angle(std::atan2(x(1, i), x(0, i)));
  }
  return theta;
}

void validate_spins(const Spins& x, int num_sites, double tol) {
  if (x.cols() != num_sites) {
    throw std::invalid_argument("configuration has " + std::to_string(x.cols()) +
                                " columns, expected " + std::to_string(num_sites));
  }
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const double n = x.col(i).norm();
    if (!(std::abs(n - 1.0) <= tol)) {
      throw std::invalid_argument("column " + std::to_string(i) +
                                  " has norm " + std::to_string(n) +
                                  ", expected a unit vector");
    }
  }
}

EnergyTerms energy_terms_angular(const Angles& theta, const Instance& inst) {
  require_angles(theta, inst);
  const Lattice& lat = inst.lattice();
  const Angles& phi = inst.field_angles();
  double coupling = 0.0;
  double field = 0.0;
  for (int i = 0; i < lat.num_sites(); ++i) {
    double s = 0.0;
    for (int j : lat.neighbors_unchecked(i)) s += std::cos(theta[i] - theta[j]);
    coupling += s;
    field += std::cos(theta[i] - phi[i]);
  }
  return {-0.5 * coupling, -field};
}

double energy_angular(const Angles& theta, const Instance& inst) {
  const EnergyTerms t = energy_terms_angular(theta, inst);
  return t.coupling + inst.delta() * t.field;
}

EnergyTerms energy_terms_cartesian(const Spins& x, const Instance& inst,
                                   Check check) {
  if (check == Check::kValidate) {
    validate_spins(x, inst.num_sites());
  }
  const Lattice& lat = inst.lattice();
  const Spins& h = inst.field_vectors();
  const double* xd = x.data();
  const double* hd = h.data();
  double coupling = 0.0;
  double field = 0.0;
  for (int i = 0; i < lat.num_sites(); ++i) {
    double sx = 0.0;
    double sy = 0.0;
    for (int j : lat.neighbors_unchecked(i)) {
      sx += xd[2 * j];
      sy += xd[2 * j + 1];
    }
    const double xi0 = xd[2 * i];
    const double xi1 = xd[2 * i + 1];
    coupling += xi0 * sx + xi1 * sy;
    field += xi0 * hd[2 * i] + xi1 * hd[2 * i + 1];
  }
  return {-0.5 * coupling, -field};
}

double energy_cartesian(const Spins& x, const Instance& inst, Check check) {
  const EnergyTerms t = energy_terms_cartesian(x, inst, check);
  return t.coupling + inst.delta() * t.field;
}

void euclidean_gradient(const Spins& x, const Instance& inst, Spins& out) {
  const Lattice& lat = inst.lattice();
  const int n = lat.num_sites();
  out.resize(2, n);
  const double delta = inst.delta();
  const double* xd = x.data();
  const double* hd = inst.field_vectors().data();
  double* od = out.data();
  for (int i = 0; i < n; ++i) {
    double sx = 0.0;
    double sy = 0.0;
    for (int j : lat.neighbors_unchecked(i)) {
      sx += xd[2 * j];
      sy += xd[2 * j + 1];
    }
    od[2 * i] = -sx - delta * hd[2 * i];
    od[2 * i + 1] = -sy - delta * hd[2 * i + 1];
  }
}

Spins euclidean_gradient(const Spins& x, const Instance& inst, Check check) {
  if (check == Check::kValidate) {
    validate_spins(x, inst.num_sites());
  }
  Spins g;
  euclidean_gradient(x, inst, g);
  return g;
}

void euclidean_hessian_vec(const Spins& v, const Instance& inst, Spins& out) {
  const Lattice& lat = inst.lattice();
  const int n = lat.num_sites();
  out.resize(2, n);
  const double* vd = v.data();
  double* od = out.data();
  for (int i = 0; i < n; ++i) {
    double sx = 0.0;
    double sy = 0.0;
    for (int j : lat.neighbors_unchecked(i)) {
      sx += vd[2 * j];
      sy += vd[2 * j + 1];
    }
    od[2 * i] = -sx;
    od[2 * i + 1] = -sy;
  }
}

Spins euclidean_hessian_vec(const Spins& v, const Instance& inst) {
  require_shape(v, inst, "direction");
  Spins out;
  euclidean_hessian_vec(v, inst, out);
  return out;
}

double energy_change(const Spins& x, const Spins& egrad_x, const Spins& y,
                     const Instance& inst, Spins& work) {
  work = y - x;
  return energy_change_by(work, egrad_x, inst);
}

double energy_change_by(const Spins& d, const Spins& egrad_x, const Instance& inst) {
  const Lattice& lat = inst.lattice();
  const double* dd = d.data();
  const double* gd = egrad_x.data();
  double linear = 0.0;
  double quad = 0.0;
  for (int i = 0; i < lat.num_sites(); ++i) {
    double sx = 0.0;
    double sy = 0.0;
    for (int j : lat.neighbors_unchecked(i)) {
      sx += dd[2 * j];
      sy += dd[2 * j + 1];
    }
    linear += dd[2 * i] * gd[2 * i] + dd[2 * i + 1] * gd[2 * i + 1];
    quad -= dd[2 * i] * sx + dd[2 * i + 1] * sy;
  }
  return linear + 0.5 * quad;
}

double energy_change(const Spins& x, const Spins& y, const Instance& inst) {
  require_shape(x, inst, "configuration");
  require_shape(y, inst, "configuration");
  Spins g, work;
  euclidean_gradient(x, inst, g);
  return energy_change(x, g, y, inst, work);
}

Angles gradient_angular(const Angles& theta, const Instance& inst) {
  require_angles(theta, inst);
  const Lattice& lat = inst.lattice();
  const Angles& phi = inst.field_angles();
  const double delta = inst.delta();
  Angles g(theta.size());
  for (int i = 0; i < lat.num_sites(); ++i) {
    double s = 0.0;
    for (int j : lat.neighbors_unchecked(i)) s += std::sin(theta[i] - theta[j]);
    g[i] = s + delta * std::sin(theta[i] - phi[i]);
  }
  return g;
}

Angles hessian_vec_angular(const Angles& theta, const Angles& v,
                           const Instance& inst) {
  require_angles(theta, inst);
  require_angles(v, inst);
  const Lattice& lat = inst.lattice();
  const Angles& phi = inst.field_angles();
  const double delta = inst.delta();
  Angles out(theta.size());
  for (int i = 0; i < lat.num_sites(); ++i) {
    double s = 0.0;
    for (int j : lat.neighbors_unchecked(i)) {
      s += std::cos(theta[i] - theta[j]) * (v[i] - v[j]);
    }
    out[i] = s + delta * std::cos(theta[i] - phi[i]) * v[i];
  }
  return out;
}

double lower_bound(const Instance& inst) {
  const Lattice& lat = inst.lattice();
  return -(lat.dim() + inst.delta()) * static_cast<double>(lat.num_sites());
}

ReferenceConfigs reference_configs(const Instance& inst) {
  ReferenceConfigs r;
  r.aligned_angle = 0.0;
  r.aligned = Angles::Zero(inst.num_sites());
  r.field_aligned = inst.field_angles();
  r.aligned_energy = energy_angular(r.aligned, inst);
  r.field_aligned_energy = energy_angular(r.field_aligned, inst);
  r.upper_bound = std::min(r.aligned_energy, r.field_aligned_energy);
  return r;
}

ReferenceConfigs reference_configs_scanned(const Instance& inst,
                                           int scan_points) {
  if (scan_points < 1) {
    throw std::invalid_argument("scan_points must be >= 1");
  }
  ReferenceConfigs r = reference_configs(inst);
  // f1 is constant on aligned configurations, so only the field term varies:
  // f2(c) = -(cos c * sum cos phi + sin c * sum sin phi).
  const Eigen::Vector2d hsum = inst.field_vectors().rowwise().sum();
  double best_field = -hsum[0];
  double best_angle = 0.0;
  for (int m = 1; m < scan_points; ++m) {
    const double c = kTwoPi * m / scan_points;
    const double f2 = -(std::cos(c) * hsum[0] + std::sin(c) * hsum[1]);
    if (f2 < best_field) {
      best_field = f2;
      best_angle = c;
    }
  }
  if (best_angle != 0.0) {
    r.aligned_angle = best_angle;
    r.aligned = Angles::Constant(inst.num_sites(), best_angle);
    r.aligned_energy = energy_angular(r.aligned, inst);
    r.upper_bound = std::min(r.aligned_energy, r.field_aligned_energy);
  }
  return r;
}

}  // namespace rfxy
