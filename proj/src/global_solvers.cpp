#include "rfxy/global_solvers.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

#include "rfxy/manifold.hpp"

namespace rfxy {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct RunOutcome {
  RunRecord record;
  Spins best;
};

struct ResolvedHooks {
  LocalSolverFn local;
  std::function<Spins(const Spins&, Rng&)> perturb;
  std::function<Spins(int, int)> start;
};

ResolvedHooks resolve(const Instance& inst, const GlobalOptions& opts,
                      const GlobalHooks& hooks) {
  ResolvedHooks h;
  h.local = hooks.local_solver ? hooks.local_solver
                               : make_local_solver(opts.local_solver);
  if (hooks.perturb) {
    h.perturb = hooks.perturb;
  } else {
    const double eta = opts.eta_max;
    const EtaConvention conv = opts.eta_convention;
    h.perturb = [eta, conv](const Spins& x, Rng& rng) {
      return to_cartesian(perturb(to_angles(x), eta, rng, conv));
    };
  }
  if (hooks.start) {
    h.start = hooks.start;
  } else {
    const std::uint64_t seed = opts.master_seed;
    h.start = [&inst, seed](int run, int index) {
      return default_start(inst, seed, run, index);
    };
  }
  return h;
}

/// Runs body(run) for run in [0, count) on up to `threads` workers.
template <typename Body>
void for_each_run(int count, int threads, Body&& body) {
  const int workers = std::clamp(threads, 1, std::max(1, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) body(i);
    });
  }
}

GlobalResult reduce(const Instance& inst, const GlobalOptions& opts,
                    std::vector<RunOutcome>& outcomes, double wall) {
  GlobalResult g;
  g.best_energy = std::numeric_limits<double>::infinity();
  g.lower_bound = lower_bound(inst);
  for (auto& o : outcomes) {
    g.total_local_searches += o.record.local_searches;
    // Runs are visited in order, so ties keep the earliest run.
    if (!o.record.failed && o.record.best_energy < g.best_energy) {
      g.best_energy = o.record.best_energy;
      g.best_run = o.record.run;
      g.best_config = std::move(o.best);
    }
    g.runs.push_back(std::move(o.record));
  }
  g.total_wall_time = wall;
  g.gap = relative_gap(g.best_energy, g.lower_bound);
  g.certificate =
      certify(inst, opts.certificate_epsilon,
              std::isfinite(g.best_energy) ? std::optional(g.best_energy)
                                           : std::nullopt);
  return g;
}

}  // namespace

std::string_view to_string(EtaConvention c) noexcept {
  return c == EtaConvention::kStdDev ? "stddev" : "variance";
}

std::string_view to_string(BudgetMode m) noexcept {
  return m == BudgetMode::kMbhNative ? "mbh_native" : "ms_matched";
}

EtaConvention parse_eta_convention(std::string_view s) {
  if (s == "stddev") return EtaConvention::kStdDev;
  if (s == "variance") return EtaConvention::kVariance;
  throw std::invalid_argument("unknown eta convention '" + std::string(s) +
                              "' (expected stddev or variance)");
}

BudgetMode parse_budget_mode(std::string_view s) {
  if (s == "mbh_native") return BudgetMode::kMbhNative;
  if (s == "ms_matched") return BudgetMode::kMsMatched;
  throw std::invalid_argument("unknown budget mode '" + std::string(s) +
                              "' (expected mbh_native or ms_matched)");
}

void GlobalOptions::validate() const {
  if (nr < 1) throw std::invalid_argument("nr must be >= 1");
  if (mni < 1) throw std::invalid_argument("mni must be >= 1");
  if (!(eta_max > 0.0)) throw std::invalid_argument("eta_max must be > 0");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  local_opts.validate();
}

Angles perturb(const Angles& theta, double eta_max, Rng& rng,
               EtaConvention conv) {
  const double sigma =
      conv == EtaConvention::kStdDev ? eta_max : std::sqrt(eta_max);
  std::normal_distribution<double> noise(0.0, sigma);
  Angles out(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    out[i] = wrap_angle(theta[i] + noise(rng));
  }
  return out;
}

Spins default_start(const Instance& inst, std::uint64_t master_seed, int run,
                    int index) {
  return random_point(inst.lattice(),
                      derive_seed(master_seed, Stream::kStarts,
                                  static_cast<std::uint64_t>(run),
                                  static_cast<std::uint64_t>(index)));
}

GlobalResult mbh(const Instance& inst, const GlobalOptions& opts,
                 const GlobalHooks& hooks) {
  opts.validate();
  const ResolvedHooks h = resolve(inst, opts, hooks);
  const auto t0 = Clock::now();
  std::vector<RunOutcome> outcomes(opts.nr);

  for_each_run(opts.nr, opts.threads, [&](int run) {
    const auto tr = Clock::now();
    RunOutcome& out = outcomes[run];
    RunRecord& rec = out.record;
    rec.run = run;
    Rng rng(derive_seed(opts.master_seed, Stream::kPerturbations,
                        static_cast<std::uint64_t>(run)));

    LocalResult x = h.local(h.start(run, 0), inst, opts.local_opts);
    ++rec.local_searches;
    if (!x.ok()) {
      ++rec.failed_searches;
      rec.failed = true;
      rec.best_energy = std::numeric_limits<double>::infinity();
      rec.wall_time = seconds_since(tr);
      return;
    }
    rec.incumbent_trace.push_back(x.energy);

    int k = 0;
    while (k < opts.mni) {
      LocalResult y = h.local(h.perturb(x.config, rng), inst, opts.local_opts);
      ++rec.local_searches;
      if (!y.ok()) ++rec.failed_searches;
      if (y.ok() && y.energy < x.energy) {
        x = std::move(y);
        k = 0;
        ++rec.improvements;
        rec.incumbent_trace.push_back(x.energy);
      } else {
        ++k;
      }
    }
    rec.best_energy = x.energy;
    out.best = std::move(x.config);
    rec.wall_time = seconds_since(tr);
  });

  return reduce(inst, opts, outcomes, seconds_since(t0));
}

GlobalResult multistart(const Instance& inst, const GlobalOptions& opts,
                        const std::vector<int>& budgets,
                        const GlobalHooks& hooks) {
  opts.validate();
  for (int b : budgets) {
    if (b < 1) throw std::invalid_argument("multistart budget must be >= 1");
  }
  const ResolvedHooks h = resolve(inst, opts, hooks);
  const auto t0 = Clock::now();
  const int runs = static_cast<int>(budgets.size());
  std::vector<RunOutcome> outcomes(runs);

  for_each_run(runs, opts.threads, [&](int run) {
    const auto tr = Clock::now();
    RunOutcome& out = outcomes[run];
    RunRecord& rec = out.record;
    rec.run = run;
    rec.best_energy = std::numeric_limits<double>::infinity();
    for (int s = 0; s < budgets[run]; ++s) {
      LocalResult y = h.local(h.start(run, s), inst, opts.local_opts);
      ++rec.local_searches;
      if (!y.ok()) {
        ++rec.failed_searches;
        continue;
      }
      if (y.energy < rec.best_energy) {
        rec.best_energy = y.energy;
        out.best = std::move(y.config);
        rec.incumbent_trace.push_back(rec.best_energy);
        if (s > 0) ++rec.improvements;
      }
    }
    rec.failed = rec.failed_searches == rec.local_searches;
    rec.wall_time = seconds_since(tr);
  });

  return reduce(inst, opts, outcomes, seconds_since(t0));
}

GlobalResult multistart(const Instance& inst, const GlobalOptions& opts,
                        int budget, const GlobalHooks& hooks) {
  return multistart(inst, opts, std::vector<int>{budget}, hooks);
}

GlobalResult multistart_matched(const Instance& inst, const GlobalOptions& opts,
                                const GlobalResult& mbh_result,
                                const GlobalHooks& hooks) {
  return multistart(inst, opts, budget_report(mbh_result), hooks);
}

std::vector<int> budget_report(const GlobalResult& result) {
  std::vector<int> counts;
  counts.reserve(result.runs.size());
  for (const auto& r : result.runs) counts.push_back(r.local_searches);
  return counts;
}

}  // namespace rfxy
