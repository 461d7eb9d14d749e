// Acceptance checks, one line per criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "csv_payload.hpp"
#include "rfxy/certificates.hpp"
#include "rfxy/global_solvers.hpp"
#include "rfxy/harness/bench.hpp"
#include "rfxy/harness/campaign.hpp"
#include "rfxy/manifold.hpp"
#include "rfxy/oracle.hpp"

using namespace rfxy;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

double rel(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

Spins random_tangent(const Spins& x, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g;
  Spins u(2, x.cols());
  for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = g(rng);
  return project_tangent(x, u);
}

// 1. Riemannian gradient against central differences of f o retract, one
// tangent direction per site; Hessian bilinear form symmetry.
Verdict derivatives() {
  const int dims[] = {1, 2, 3};
  const int sizes[] = {3, 4, 6};
  const double deltas[] = {0.1, 1.0, 3.0};
  const double h = 1e-5;
  double worst_grad = 0.0, worst_sym = 0.0;
  for (int p = 0; p < 50; ++p) {
    const int d = dims[p % 3];
    const int L = sizes[(p / 3) % 3];
    const double delta = deltas[(p / 9) % 3];
    const Instance inst = generate_disorder(Lattice(d, L), delta, 1000 + p);
    const Spins x = random_point(inst.lattice(), 2000 + p);
    const Spins g = riemannian_gradient(x, inst);
    const int n = inst.num_sites();

    Spins fd = Spins::Zero(2, n);
    Spins e = Spins::Zero(2, n);
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector2d t(-x(1, i), x(0, i));
      e.col(i) = t;
      const double slope = (energy_cartesian(retract(x, h * e), inst) -
                            energy_cartesian(retract(x, -h * e), inst)) /
                           (2 * h);
      fd.col(i) = slope * t;
      e.col(i).setZero();
    }
    worst_grad = std::max(worst_grad, (fd - g).norm() / g.norm());

    const Spins u = random_tangent(x, 3000 + p);
    const Spins v = random_tangent(x, 4000 + p);
    const double a = inner(u, riemannian_hessian_vec(x, v, inst));
    const double b = inner(v, riemannian_hessian_vec(x, u, inst));
    worst_sym = std::max(worst_sym, rel(a, b));
  }
  return {worst_grad <= 1e-5 && worst_sym <= 1e-10,
          fmt::format("50 pairs: max gradient rel. error {:.2e} (<= 1e-5), "
                      "max Hessian asymmetry {:.2e} (<= 1e-10)",
                      worst_grad, worst_sym)};
}

// 2. Lower bound on every emitted energy, term bounds, aligned energy at
// zero disorder.
Verdict bounds() {
  long emitted = 0, violations = 0;
  std::mutex mu;
  auto record = [&](const LocalResult& r, const Instance& inst) {
    std::lock_guard lock(mu);
    ++emitted;
    if (!(r.energy >= lower_bound(inst))) ++violations;
  };
  for (auto [d, L, delta] : {std::tuple{1, 8, 0.5}, std::tuple{2, 5, 2.0},
                             std::tuple{3, 6, 2.5}, std::tuple{3, 4, 60.0},
                             std::tuple{3, 6, 0.05}}) {
    const Instance inst = generate_disorder(Lattice(d, L), delta, 7);
    for (LocalSolverKind kind : {LocalSolverKind::kRtr, LocalSolverKind::kRcg}) {
      GlobalOptions o;
      o.nr = 3;
      o.mni = 3;
      o.local_solver = kind;
      o.master_seed = 11;
      GlobalHooks hooks;
      const LocalSolverFn inner_solver = make_local_solver(kind);
      hooks.local_solver = [&](const Spins& x, const Instance& in,
                               const SolverOptions& so) {
        LocalResult r = inner_solver(x, in, so);
        record(r, in);
        return r;
      };
      const GlobalResult m = mbh(inst, o, hooks);
      const GlobalResult s = multistart_matched(inst, o, m, hooks);
      for (double f : {m.best_energy, s.best_energy}) {
        ++emitted;
        if (!(f >= lower_bound(inst))) ++violations;
      }
    }
  }

  const Instance inst = generate_disorder(Lattice(3, 6), 1.5, 3);
  const int n = inst.num_sites();
  Rng rng(99);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  long term_violations = 0;
  for (int c = 0; c < 1000; ++c) {
    Angles th(n);
    for (auto& a : th) a = u(rng);
    const EnergyTerms t = energy_terms_angular(th, inst);
    if (t.coupling < -3.0 * n || t.coupling > 3.0 * n || t.field < -n || t.field > n) {
      ++term_violations;
    }
  }

  double worst_aligned = 0.0;
  for (int d = 1; d <= 3; ++d) {
    for (int L : {3, 4, 10}) {
      const Instance z = generate_disorder(Lattice(d, L), 0.0, 1);
      const double want = -d * std::pow(L, d);
      for (double c : {0.0, 1.0, 4.0}) {
        const double f = energy_cartesian(
            to_cartesian(Angles::Constant(z.num_sites(), c)), z);
        worst_aligned = std::max(worst_aligned, rel(f, want));
      }
    }
  }
  return {violations == 0 && term_violations == 0 && worst_aligned <= 1e-9,
          fmt::format("{} energies, {} below f_low; 1000 configs, {} term-bound "
                      "violations; aligned at delta=0 rel. error {:.1e}",
                      emitted, violations, term_violations, worst_aligned)};
}

// 3. Constant and dipole directions of the Euclidean Hessian.
Verdict indefiniteness() {
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d) {
    for (int L : {3, 4, 6}) {
      const Instance inst = generate_disorder(Lattice(d, L), 1.0, 5);
      const int n = inst.num_sites();
      const Eigen::Vector2d vbar(0.8, -0.35);
      const Spins c = vbar.replicate(1, n);
      const double qc = inner(c, euclidean_hessian_vec(c, inst));
      worst = std::max(worst, rel(qc, -2.0 * d * n * vbar.squaredNorm()));

      Spins dip = Spins::Zero(2, n);
      const int i = n / 2;
      dip.col(i) = vbar;
      dip.col(inst.lattice().neighbors(i)[1]) = -vbar;
      const double qd = inner(dip, euclidean_hessian_vec(dip, inst));
      worst = std::max(worst, rel(qd, 2.0 * vbar.squaredNorm()));
    }
  }
  return {worst <= 1e-12,
          fmt::format("d=1,2,3: max rel. error {:.1e} (<= 1e-12)", worst)};
}

// 4. Certified reference configurations at both ends of the disorder range.
Verdict certificates() {
  const double eps = 0.1;
  const Thresholds t = epsilon_thresholds(3, eps);
  bool ok = rel(t.delta1 * t.delta2, 9.0) <= 1e-12;
  double worst_lo = 0.0, worst_hi = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Instance lo = generate_disorder(Lattice(3, 10), 0.05, seed);
    const Instance hi = generate_disorder(Lattice(3, 10), 60.0, seed);
    const EpsCertificate clo = certify(lo, eps);
    const EpsCertificate chi = certify(hi, eps);
    ok = ok && clo.regime == Regime::kBelowDelta1 &&
         chi.regime == Regime::kAboveDelta2;
    worst_lo = std::max(worst_lo,
                        relative_gap(energy_angular(reference_configs(lo).aligned, lo),
                                     lower_bound(lo)));
    worst_hi = std::max(
        worst_hi, relative_gap(energy_angular(reference_configs(hi).field_aligned, hi),
                               lower_bound(hi)));
  }
  ok = ok && worst_lo < eps && worst_hi < eps;
  return {ok, fmt::format("d=3 eps=0.1: gap at delta=0.05 {:.4f}, at delta=60 "
                          "{:.4f} (< 0.1); delta1*delta2 = {:.12g}",
                          worst_lo, worst_hi, t.delta1 * t.delta2)};
}

// 5. MBH reaches the refined grid target on tiny instances.
Verdict oracle() {
  int cases = 0, met = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (auto [d, L, k] : {std::tuple{1, 4, 8}, std::tuple{2, 3, 6}}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      for (double delta : {0.5, 2.0, 5.0}) {
        const Instance inst = generate_disorder(Lattice(d, L), delta, seed);
        const GridResult g = brute_force_grid(inst, GridSpec{k, 20'000'000});
        const LocalResult target = refine_from_grid(inst, g.config);
        GlobalOptions o;
        o.nr = 3;
        o.mni = 5;
        o.master_seed = seed;
        const GlobalResult m = mbh(inst, o);
        ++cases;
        const double excess = m.best_energy - target.energy;
        worst = std::max(worst, excess);
        if (excess <= 1e-6) ++met;
      }
    }
  }
  return {met == cases,
          fmt::format("{}/{} cases with MBH <= target + 1e-6; worst excess {:.2e}",
                      met, cases, worst)};
}

// 6. MBH against matched MultiStart over master seeds.
Verdict mbh_vs_ms() {
  const Instance inst = generate_disorder(Lattice(3, 10), 2.5, 1);
  int wins = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GlobalOptions o;
    o.nr = 5;
    o.mni = 5;
    o.master_seed = seed;
    const GlobalResult m = mbh(inst, o);
    const GlobalResult s = multistart_matched(inst, o, m);
    if (m.best_energy <= s.best_energy) ++wins;
    worst = std::max(worst, (m.best_energy - s.best_energy) / std::abs(s.best_energy));
  }
  return {wins >= 7 && worst <= 1e-3,
          fmt::format("MBH <= MS on {}/10 seeds (>= 7); worst relative excess "
                      "{:.2e} (<= 1e-3)",
                      wins, std::max(worst, 0.0))};
}

// 7. Energy per site on the reference desk instance.
Verdict per_site() {
  const Instance inst = generate_disorder(Lattice(3, 10), 2.0, 1);
  GlobalOptions o;
  o.nr = 5;
  o.mni = 5;
  o.master_seed = 1;
  const GlobalResult m = mbh(inst, o);
  const double e = m.best_energy / inst.num_sites();
  return {e >= -3.45 && e <= -3.15,
          fmt::format("best {:.4f}, per site {:.5f} (in [-3.45, -3.15])",
                      m.best_energy, e)};
}

// 8. Cartesian kernels against angular kernels at L = 32.
Verdict speedup() {
  const Instance inst = generate_disorder(Lattice(3, 32), 2.0, 1);
  const auto rows = harness::bench_kernels(inst, 200);
  using harness::Formulation;
  const double cart = harness::bench_time(rows, "cost", Formulation::kManifold);
  const double ang = harness::bench_time(rows, "cost", Formulation::kAngular);
  const double rg = harness::bench_time(rows, "Riemannian gradient", Formulation::kManifold);
  const double ag = harness::bench_time(rows, "Euclidean gradient", Formulation::kAngular);
  return {ang >= 2.0 * cart && rg < ag,
          fmt::format("cost {:.2e}s vs {:.2e}s ({:.1f}x, >= 2x); Riemannian "
                      "gradient {:.2e}s vs angular gradient {:.2e}s",
                      cart, ang, ang / cart, rg, ag)};
}

// 9. Loop structure of MBH with scripted local solves.
Verdict algorithm_fidelity() {
  const Instance inst = generate_disorder(Lattice(2, 3), 1.0, 1);
  auto scripted = [](std::vector<double> energies) {
    auto next = std::make_shared<std::size_t>(0);
    GlobalHooks h;
    h.perturb = [](const Spins& x, Rng&) { return x; };
    h.local_solver = [energies, next](const Spins& x, const Instance&,
                                      const SolverOptions&) {
      LocalResult r;
      r.config = x;
      r.energy = energies[std::min(*next, energies.size() - 1)];
      ++*next;
      r.status = Status::kConverged;
      return r;
    };
    return h;
  };
  GlobalOptions o;
  o.nr = 1;

  bool ok = true;
  std::string detail;
  // per run: initial solve, then one rejected perturbation
  {
    o.mni = 1;
    o.nr = 4;
    GlobalHooks h;
    h.perturb = [](const Spins& x, Rng&) { return x; };
    h.local_solver = [](const Spins& x, const Instance&, const SolverOptions&) {
      LocalResult r;
      r.config = x;
      // first solve of each run lands at -1, perturbed solves are worse
      r.energy = x(0, 0) > 2.0 ? 0.0 : -1.0;
      r.status = Status::kConverged;
      return r;
    };
    h.perturb = [](const Spins& x, Rng&) {
      Spins y = x;
      y(0, 0) = 3.0;
      return y;
    };
    const GlobalResult g = mbh(inst, o, h);
    bool two = true;
    for (const RunRecord& r : g.runs) two = two && r.local_searches == 2;
    ok = ok && two;
    detail += fmt::format("MNI=1 worse: {} per run", g.runs[0].local_searches);
  }
  {
    o.nr = 1;
    o.mni = 4;
    const GlobalResult g = mbh(inst, o, scripted({-1.0, -2.0, -1.5}));
    ok = ok && g.runs[0].local_searches == o.mni + 2 && g.best_energy == -2.0;
    detail += fmt::format("; improve-then-worse: {} (MNI+2 = {})",
                          g.runs[0].local_searches, o.mni + 2);
  }
  {
    o.mni = 3;
    const GlobalResult g = mbh(inst, o, scripted({-1.0}));
    ok = ok && g.runs[0].improvements == 0 && g.runs[0].local_searches == 4;
    detail += fmt::format("; ties: {} accepted", g.runs[0].improvements);
  }
  return {ok, detail};
}

// 10. Two serial campaign runs give identical reports apart from timing.
Verdict reproducibility() {
  const fs::path dir = fs::temp_directory_path() / "rfxy_acceptance_repro";
  fs::remove_all(dir);
  harness::Campaign c;
  c.instances = {{3, 6, 2.0, 1, "h1", {}}, {3, 6, 3.0, 2, "h2", {}}};
  c.options.nr = 3;
  c.options.mni = 3;
  c.options.master_seed = 42;
  c.options.threads = 1;
  c.instance_dir = dir / "instances";
  std::string payload[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path prefix = dir / fmt::format("run{}", k);
    harness::write_reports(harness::run_campaign(c), prefix);
    std::ifstream in(fs::path(prefix.string() + ".csv"), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    payload[k] = test_support::strip_timing_columns(ss.str());
  }
  const bool same = payload[0] == payload[1] && !payload[0].empty();
  return {same, fmt::format("{} bytes of CSV payload, {}", payload[0].size(),
                            same ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> checks = {
      {"derivatives", derivatives},
      {"bounds", bounds},
      {"indefiniteness", indefiniteness},
      {"certificates", certificates},
      {"grid oracle", oracle},
      {"MBH vs MS", mbh_vs_ms},
      {"energy per site", per_site},
      {"formulation speed-up", speedup},
      {"MBH loop fidelity", algorithm_fidelity},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Verdict v;
    try {
      v = checks[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    fmt::print("criterion {:>2} {:<22} {}  {}\n", i + 1, checks[i].first,
               v.pass ? "PASS" : "FAIL", v.detail);
    std::fflush(stdout);
  }
  return failed;
}
