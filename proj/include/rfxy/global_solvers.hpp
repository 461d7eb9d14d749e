#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "rfxy/certificates.hpp"
#include "rfxy/local_solvers.hpp"
#include "rfxy/rng.hpp"

namespace rfxy {

/// How eta_max parameterises the Gaussian perturbation N(0, eta_max).
enum class EtaConvention { kStdDev, kVariance };
enum class BudgetMode { kMbhNative, kMsMatched };

std::string_view to_string(EtaConvention c) noexcept;
std::string_view to_string(BudgetMode m) noexcept;
EtaConvention parse_eta_convention(std::string_view s);
BudgetMode parse_budget_mode(std::string_view s);

struct GlobalOptions {
  int nr = 50;   ///< outer MultiStart runs
  int mni = 15;  ///< consecutive non-improving perturbations per run
  double eta_max = 0.5;
  EtaConvention eta_convention = EtaConvention::kStdDev;
  LocalSolverKind local_solver = LocalSolverKind::kRtr;
  SolverOptions local_opts;
  std::uint64_t master_seed = 0;
  BudgetMode budget_mode = BudgetMode::kMbhNative;
  /// Worker threads for outer runs; results do not depend on it.
  int threads = 1;
  /// eps used for the certificate attached to results.
  double certificate_epsilon = 0.1;

  void validate() const;
};

struct RunRecord {
  int run = 0;
  int local_searches = 0;
  int failed_searches = 0;
  int improvements = 0;
  double best_energy = 0.0;
  double wall_time = 0.0;
  bool failed = false;
  /// Incumbent energy after the initial solve and after each acceptance.
  std::vector<double> incumbent_trace;
};

struct GlobalResult {
  Spins best_config;
  double best_energy = 0.0;
  int best_run = -1;
  std::vector<RunRecord> runs;
  long total_local_searches = 0;
  double total_wall_time = 0.0;
  double lower_bound = 0.0;
  /// (best_energy - f_low) / |f_low|
  double gap = 0.0;
  EpsCertificate certificate{};
};

/// theta_i + eta_i with eta_i ~ N(0, eta_max) under `conv`, wrapped to
/// [0, 2pi).
Angles perturb(const Angles& theta, double eta_max, Rng& rng,
               EtaConvention conv = EtaConvention::kStdDev);

/// Replaceable pieces of the global loops. Empty members use the defaults
/// built from GlobalOptions.
struct GlobalHooks {
  LocalSolverFn local_solver;
  /// Perturbation of a local minimiser (Cartesian in, Cartesian out).
  std::function<Spins(const Spins& x, Rng& rng)> perturb;
  /// Random start for (run, index within run).
  std::function<Spins(int run, int index)> start;
};

/// MultiStart Monotonic Basin Hopping: per run, a random start is solved and
/// then repeatedly perturbed and re-solved; strictly better minima replace
/// the incumbent and reset the failure counter, otherwise it increments
/// until it reaches mni.
GlobalResult mbh(const Instance& inst, const GlobalOptions& opts,
                 const GlobalHooks& hooks = {});

/// One run of `budget` independent local solves from random starts.
GlobalResult multistart(const Instance& inst, const GlobalOptions& opts,
                        int budget, const GlobalHooks& hooks = {});

/// One run per entry of `budgets`, each performing that many solves.
GlobalResult multistart(const Instance& inst, const GlobalOptions& opts,
                        const std::vector<int>& budgets,
                        const GlobalHooks& hooks = {});

/// MultiStart with the per-run local-search counts of a prior MBH result.
GlobalResult multistart_matched(const Instance& inst, const GlobalOptions& opts,
                                const GlobalResult& mbh_result,
                                const GlobalHooks& hooks = {});

/// Local searches performed in each run.
std::vector<int> budget_report(const GlobalResult& result);

/// Start used for (run, index) under the default hooks. MBH and MultiStart
/// share it, so each MBH run starts where the matching MultiStart run does.
Spins default_start(const Instance& inst, std::uint64_t master_seed, int run,
                    int index);

}  // namespace rfxy
