// Command-line driver: instance generation, single solves, campaigns,
// kernel benchmarks and the grid oracle.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "rfxy/certificates.hpp"
#include "rfxy/global_solvers.hpp"
#include "rfxy/harness/bench.hpp"
#include "rfxy/harness/campaign.hpp"
#include "rfxy/harness/config.hpp"
#include "rfxy/harness/instance_io.hpp"
#include "rfxy/manifold.hpp"
#include "rfxy/oracle.hpp"

namespace fs = std::filesystem;
using namespace rfxy;
using namespace rfxy::harness;

namespace {

struct InstanceArgs {
  int dim = 3;
  int size = 10;
  double delta = 2.0;
  std::uint64_t seed = 1;
  std::string file;

  void add_to(CLI::App* app) {
    app->add_option("-d,--dim", dim, "lattice dimension")->capture_default_str();
    app->add_option("-L,--size", size, "linear lattice size")->capture_default_str();
    app->add_option("--delta", delta, "disorder strength")->capture_default_str();
    app->add_option("--seed", seed, "disorder seed")->capture_default_str();
    app->add_option("-i,--instance", file,
                    "instance file (overrides d/L/delta/seed)")
        ->check(CLI::ExistingFile);
  }

  Instance build() const {
    if (!file.empty()) return load_instance(file);
    return generate_disorder(Lattice(dim, size), delta, seed);
  }
};

struct OptionArgs {
  std::string config;
  bool checked = false;
  std::vector<std::string> sets;

  void add_to(CLI::App* app) {
    app->add_option("-c,--config", config, "key = value options file")
        ->check(CLI::ExistingFile);
    app->add_flag("--checked", checked, "validate feasibility of every iterate");
    app->add_option("--set", sets, "extra option as key=value (repeatable)");
  }

  GlobalOptions build() const {
    GlobalOptions opts;
    if (!config.empty()) opts = load_options(config);
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
      }
      auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      const std::string key = trim(kv.substr(0, eq));
      if (!apply_option(opts, key, trim(kv.substr(eq + 1)))) {
        throw std::invalid_argument("unknown option '" + key + "'");
      }
    }
    if (checked) opts.local_opts.checked = true;
    if (auto t = threads_from_env()) opts.threads = *t;
    opts.validate();
    return opts;
  }
};

nlohmann::json certificate_json(const EpsCertificate& c) {
  return {{"epsilon", c.epsilon},
          {"delta", c.delta},
          {"regime", std::string(to_string(c.regime))},
          {"delta1", c.delta1},
          {"delta2", c.delta2},
          {"certified_config", std::string(to_string(c.certified_config))},
          {"gap_bound", c.gap_bound}};
}

void write_json(const nlohmann::json& j, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

int cmd_gen(const InstanceArgs& ia, const std::string& out) {
  const Instance inst = generate_disorder(Lattice(ia.dim, ia.size), ia.delta, ia.seed);
  save_instance(inst, out);
  fmt::print("wrote {} ({} sites) and {}\n", out, inst.num_sites(),
             sidecar_path(out).string());
  return 0;
}

int cmd_solve(const InstanceArgs& ia, const OptionArgs& oa,
              const std::string& method, const std::string& out) {
  const Instance inst = ia.build();
  const GlobalOptions opts = oa.build();
  nlohmann::json j;
  j["instance"] = instance_to_json(inst);
  j["instance"].erase("field_angles");
  j["method"] = method;

  if (method == "rtr" || method == "rcg") {
    const LocalResult r = make_local_solver(parse_local_solver(method))(
        default_start(inst, opts.master_seed, 0, 0), inst, opts.local_opts);
    const EpsCertificate cert = certify(inst, opts.certificate_epsilon, r.energy);
    fmt::print("{}: energy {:.10f}  per site {:.6f}  |grad| {:.2e}  iters {}  "
               "status {}  {:.3f}s\n",
               method, r.energy, r.energy / inst.num_sites(), r.grad_norm,
               r.iterations, to_string(r.status), r.wall_time);
    fmt::print("lower bound {:.6f}  gap {:.6f}  regime {}\n", lower_bound(inst),
               relative_gap(r.energy, lower_bound(inst)), to_string(cert.regime));
    j["energy"] = r.energy;
    j["grad_norm"] = r.grad_norm;
    j["iterations"] = r.iterations;
    j["status"] = std::string(to_string(r.status));
    j["wall_seconds"] = r.wall_time;
    j["certificate"] = certificate_json(cert);
    j["angles"] = std::vector<double>(to_angles(r.config).begin(),
                                      to_angles(r.config).end());
    write_json(j, out);
    return r.ok() ? 0 : 2;
  }

  GlobalResult g;
  if (method == "mbh") {
    g = mbh(inst, opts);
  } else if (method == "ms") {
    // Standalone MultiStart: nr runs of mni + 1 solves each.
    g = multistart(inst, opts, std::vector<int>(opts.nr, opts.mni + 1));
  } else if (method == "both") {
    g = mbh(inst, opts);
    const GlobalResult ms = multistart_matched(inst, opts, g);
    fmt::print("MS : best {:.10f}  searches {}  {:.3f}s\n", ms.best_energy,
               ms.total_local_searches, ms.total_wall_time);
    j["ms_best_energy"] = ms.best_energy;
    j["ms_local_searches"] = ms.total_local_searches;
  } else {
    throw std::invalid_argument("unknown method '" + method + "'");
  }
  fmt::print("{}: best {:.10f}  per site {:.6f}  run {}  searches {}  {:.3f}s\n",
             method == "both" ? "MBH" : method, g.best_energy,
             g.best_energy / inst.num_sites(), g.best_run, g.total_local_searches,
             g.total_wall_time);
  fmt::print("lower bound {:.6f}  gap {:.6f}  regime {}\n", g.lower_bound, g.gap,
             to_string(g.certificate.regime));
  j["energy"] = g.best_energy;
  j["best_run"] = g.best_run;
  j["local_searches"] = g.total_local_searches;
  j["wall_seconds"] = g.total_wall_time;
  j["lower_bound"] = g.lower_bound;
  j["gap"] = g.gap;
  j["certificate"] = certificate_json(g.certificate);
  j["run_budgets"] = budget_report(g);
  if (g.best_config.cols() > 0) {
    const Angles a = to_angles(g.best_config);
    j["angles"] = std::vector<double>(a.begin(), a.end());
  }
  write_json(j, out);
  return g.best_run >= 0 ? 0 : 2;
}

int cmd_campaign(const std::string& file, const std::string& output,
                 std::optional<CampaignMode> force_mode, const OptionArgs& oa,
                 bool quiet) {
  Campaign c = load_campaign(file);
  if (force_mode) c.mode = *force_mode;
  if (!output.empty()) c.output = output;
  if (oa.checked) c.options.local_opts.checked = true;
  if (auto t = threads_from_env()) c.options.threads = *t;
  const CampaignReport rep = run_campaign(c, quiet ? nullptr : &std::cerr);
  write_reports(rep, c.output);
  std::cout << to_csv(rep.rows);
  fmt::print(stderr, "reports written to {}.csv / .json / _runs.txt\n",
             c.output.string());
  return 0;
}

int cmd_bench(const InstanceArgs& ia, int reps, const std::string& out) {
  const Instance inst = ia.build();
  const auto rows = bench_kernels(inst, reps);
  fmt::print("d={} L={} n={} reps={}\n", inst.lattice().dim(),
             inst.lattice().size(), inst.num_sites(), reps);
  std::cout << format_bench_table(rows);
  const double cart = bench_time(rows, "cost", Formulation::kManifold);
  const double ang = bench_time(rows, "cost", Formulation::kAngular);
  const double rg = bench_time(rows, "Riemannian gradient", Formulation::kManifold);
  const double ag = bench_time(rows, "Euclidean gradient", Formulation::kAngular);
  fmt::print("cost speed-up {:.2f}x, Riemannian vs angular gradient {:.2f}x\n",
             ang / cart, ag / rg);
  if (!out.empty()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
      j.push_back({{"operation", r.operation},
                   {"formulation",
                    r.formulation == Formulation::kManifold ? "manifold" : "angular"},
                   {"mean_seconds", r.mean_seconds}});
    }
    write_json(j, out);
  }
  return 0;
}

int cmd_oracle(const InstanceArgs& ia, int k, std::uint64_t cap,
               const OptionArgs& oa) {
  const Instance inst = ia.build();
  const GridResult g = brute_force_grid(inst, GridSpec{k, cap});
  const LocalResult r = refine_from_grid(inst, g.config, oa.build().local_opts);
  fmt::print("grid k={} evaluated {}  energy {:.12f}\n", k, g.evaluated, g.energy);
  fmt::print("refined energy {:.12f}  |grad| {:.2e}  status {}\n", r.energy,
             r.grad_norm, to_string(r.status));
  std::string idx;
  for (int m : g.indices) idx += fmt::format("{} ", m);
  fmt::print("grid indices: {}\n", idx);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of the random-field XY model"};
  app.require_subcommand(1);

  InstanceArgs gen_ia;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "generate and save an instance");
  gen_ia.add_to(gen);
  gen->add_option("-o,--out", gen_out, "instance file")->required();

  InstanceArgs solve_ia;
  OptionArgs solve_oa;
  std::string method = "mbh", solve_out;
  auto* solve = app.add_subcommand("solve", "solve one instance with one method");
  solve_ia.add_to(solve);
  solve_oa.add_to(solve);
  solve->add_option("-m,--method", method, "rtr | rcg | mbh | ms | both")
      ->check(CLI::IsMember({"rtr", "rcg", "mbh", "ms", "both"}))
      ->capture_default_str();
  solve->add_option("-o,--out", solve_out, "JSON result file");

  std::string camp_file, camp_out;
  OptionArgs camp_oa;
  bool quiet = false;
  auto* camp = app.add_subcommand("campaign", "run a campaign file");
  camp->add_option("file", camp_file, "campaign file")->required()->check(CLI::ExistingFile);
  camp->add_option("-o,--output", camp_out, "report path prefix");
  camp->add_flag("--checked", camp_oa.checked, "validate feasibility of every iterate");
  camp->add_flag("-q,--quiet", quiet, "no progress output");

  std::string cmp_file, cmp_out;
  OptionArgs cmp_oa;
  auto* cmp = app.add_subcommand("compare-local",
                                 "RTR vs RCG from shared random starts");
  cmp->add_option("file", cmp_file, "campaign file")->required()->check(CLI::ExistingFile);
  cmp->add_option("-o,--output", cmp_out, "report path prefix");
  cmp->add_flag("--checked", cmp_oa.checked, "validate feasibility of every iterate");
  cmp->add_flag("-q,--quiet", quiet, "no progress output");

  InstanceArgs bench_ia;
  bench_ia.size = 32;
  int reps = 200;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "time objective kernels");
  bench_ia.add_to(bench);
  bench->add_option("-r,--reps", reps, "repetitions (>= 100)")->capture_default_str();
  bench->add_option("-o,--out", bench_out, "JSON timing file");

  InstanceArgs or_ia;
  or_ia.dim = 1;
  or_ia.size = 4;
  OptionArgs or_oa;
  int k = 8;
  std::uint64_t cap = GridSpec{}.cap;
  auto* oracle = app.add_subcommand("oracle", "brute-force grid target");
  oracle->group("");
  or_ia.add_to(oracle);
  or_oa.add_to(oracle);
  oracle->add_option("-k", k, "grid points per site")->capture_default_str();
  oracle->add_option("--cap", cap, "largest grid size")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(gen_ia, gen_out);
    if (*solve) return cmd_solve(solve_ia, solve_oa, method, solve_out);
    if (*camp) return cmd_campaign(camp_file, camp_out, std::nullopt, camp_oa, quiet);
    if (*cmp) {
      return cmd_campaign(cmp_file, cmp_out, CampaignMode::kCompareLocal, cmp_oa, quiet);
    }
    if (*bench) return cmd_bench(bench_ia, reps, bench_out);
    if (*oracle) return cmd_oracle(or_ia, k, cap, or_oa);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
