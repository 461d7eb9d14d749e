#include "rfxy/harness/bench.hpp"

#include <chrono>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "rfxy/manifold.hpp"

namespace rfxy::harness {

namespace {

using Clock = std::chrono::steady_clock;

// Keeps results observable so the timed calls are not elided.
volatile double g_sink = 0.0;

template <typename F>
double mean_time(int reps, F&& f) {
  for (int i = 0; i < 3; ++i) g_sink = g_sink + f();
  const auto t0 = Clock::now();
  double acc = 0.0;
  for (int i = 0; i < reps; ++i) acc += f();
  const double total = std::chrono::duration<double>(Clock::now() - t0).count();
  g_sink = g_sink + acc;
  return total / reps;
}

}  // namespace

std::vector<BenchRow> bench_kernels(const Instance& inst, int repetitions,
                                    std::uint64_t seed) {
  if (repetitions < 100) {
    throw std::invalid_argument("bench_kernels needs at least 100 repetitions");
  }
  const int n = inst.num_sites();
  const Spins x = random_point(inst.lattice(), seed);
  const Angles theta = to_angles(x);
  const Spins v = project_tangent(x, random_point(inst.lattice(), seed + 1));
  const Angles va = to_angles(random_point(inst.lattice(), seed + 2));
  Spins work, egrad, out;
  work.resize(2, n);

  std::vector<BenchRow> rows;
  auto add = [&](std::string op, Formulation f, double t) {
    rows.push_back({std::move(op), f, t});
  };

  add("cost", Formulation::kManifold, mean_time(repetitions, [&] {
        return energy_cartesian(x, inst, Check::kSkip);
      }));
  add("cost", Formulation::kAngular, mean_time(repetitions, [&] {
        return energy_angular(theta, inst);
      }));
  add("cost + retraction", Formulation::kManifold, mean_time(repetitions, [&] {
        retract(x, v, work);
        return energy_cartesian(work, inst, Check::kSkip);
      }));
  add("Euclidean gradient", Formulation::kManifold, mean_time(repetitions, [&] {
        euclidean_gradient(x, inst, egrad);
        return egrad(0, 0);
      }));
  add("Euclidean gradient", Formulation::kAngular, mean_time(repetitions, [&] {
        return gradient_angular(theta, inst)[0];
      }));
  add("Riemannian gradient", Formulation::kManifold, mean_time(repetitions, [&] {
        euclidean_gradient(x, inst, egrad);
        project_tangent_inplace(x, egrad);
        return egrad(0, 0);
      }));
  add("Euclidean Hessian", Formulation::kManifold, mean_time(repetitions, [&] {
        euclidean_hessian_vec(v, inst, out);
        return out(0, 0);
      }));
  add("Euclidean Hessian", Formulation::kAngular, mean_time(repetitions, [&] {
        return hessian_vec_angular(theta, va, inst)[0];
      }));
  add("Riemannian Hessian", Formulation::kManifold, mean_time(repetitions, [&] {
        euclidean_gradient(x, inst, egrad);
        riemannian_hessian_vec(x, egrad, v, inst, out);
        return out(0, 0);
      }));
  return rows;
}

double bench_time(const std::vector<BenchRow>& rows, const std::string& operation,
                  Formulation formulation) {
  for (const BenchRow& r : rows) {
    if (r.operation == operation && r.formulation == formulation) {
      return r.mean_seconds;
    }
  }
  throw std::out_of_range("no benchmark row for '" + operation + "'");
}

std::string format_bench_table(const std::vector<BenchRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<double, double>> table;
  for (const BenchRow& r : rows) {
    auto [it, inserted] = table.try_emplace(r.operation, -1.0, -1.0);
    if (inserted) order.push_back(r.operation);
    (r.formulation == Formulation::kManifold ? it->second.first
                                             : it->second.second) = r.mean_seconds;
  }
  auto cell = [](double t) {
    return t < 0.0 ? std::string("--") : fmt::format("{:.2e}", t);
  };
  std::string out = fmt::format("{:<22}{:>12}{:>12}\n", "operation", "manifold",
                                "unconstr.");
  for (const auto& op : order) {
    const auto& [m, a] = table[op];
    out += fmt::format("{:<22}{:>12}{:>12}\n", op, cell(m), cell(a));
  }
  return out;
}

}  // namespace rfxy::harness
