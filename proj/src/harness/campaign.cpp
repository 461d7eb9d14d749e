#include "rfxy/harness/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "rfxy/harness/instance_io.hpp"
#include "rfxy/manifold.hpp"

namespace rfxy::harness {

namespace {

const std::vector<std::string> kCampaignKeys = {
    "mode", "instance", "instance_file", "local_runs", "instance_dir", "output"};

std::filesystem::path resolve_path(const std::filesystem::path& base,
                                   const std::filesystem::path& p) {
  if (p.is_absolute() || base.empty()) return p;
  return base / p;
}

InstanceSpec parse_instance_line(const std::string& value) {
  std::istringstream ss(value);
  InstanceSpec s;
  if (!(ss >> s.dim >> s.size >> s.delta >> s.seed)) {
    throw std::invalid_argument("instance: expected '<d> <L> <delta> <seed> [label]', got '" +
                                value + "'");
  }
  ss >> s.label;
  if (s.label.empty()) s.label = fmt::format("seed{}", s.seed);
  return s;
}

std::filesystem::path generated_name(const InstanceSpec& s) {
  return fmt::format("d{}_L{}_delta{}_seed{}.rfxy", s.dim, s.size, s.delta, s.seed);
}

struct PreparedInstance {
  InstanceSpec spec;
  Instance instance;
};

std::vector<PreparedInstance> prepare_instances(const Campaign& c) {
  std::vector<PreparedInstance> out;
  out.reserve(c.instances.size());
  for (const InstanceSpec& spec : c.instances) {
    std::filesystem::path path = spec.file;
    if (path.empty()) {
      std::filesystem::create_directories(c.instance_dir);
      path = c.instance_dir / generated_name(spec);
      save_instance(generate_disorder(Lattice(spec.dim, spec.size), spec.delta,
                                      spec.seed),
                    path);
    }
    Instance inst = load_instance(path);
    InstanceSpec resolved = spec;
    resolved.dim = inst.lattice().dim();
    resolved.size = inst.lattice().size();
    resolved.delta = inst.delta();
    resolved.seed = inst.disorder_seed();
    resolved.file = path;
    if (resolved.label.empty()) resolved.label = fmt::format("seed{}", resolved.seed);
    out.push_back({std::move(resolved), std::move(inst)});
  }
  return out;
}

ReportRow base_row(const PreparedInstance& p, std::string solver) {
  ReportRow r;
  r.dim = p.spec.dim;
  r.size = p.spec.size;
  r.delta = p.spec.delta;
  r.field_label = p.spec.label;
  r.disorder_seed = p.spec.seed;
  r.solver = std::move(solver);
  r.lower_bound = lower_bound(p.instance);
  return r;
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json runs_json(const GlobalResult& g) {
  nlohmann::json arr = nlohmann::json::array();
  for (const RunRecord& r : g.runs) {
    arr.push_back({{"run", r.run},
                   {"local_searches", r.local_searches},
                   {"failed_searches", r.failed_searches},
                   {"improvements", r.improvements},
                   {"best_energy", number_or_null(r.best_energy)},
                   {"incumbent_trace", r.incumbent_trace},
                   {"wall_seconds", r.wall_time}});
  }
  return arr;
}

ReportRow global_row(const PreparedInstance& p, const char* name,
                     const GlobalResult& g) {
  ReportRow row = base_row(p, name);
  row.best_energy = g.best_energy;
  row.gap = g.gap;
  row.local_searches = g.total_local_searches;
  std::vector<double> bests;
  for (const RunRecord& r : g.runs) {
    row.failed_searches += r.failed_searches;
    if (!r.failed) bests.push_back(r.best_energy);
  }
  row.distinct_minima = count_distinct(bests);
  row.wall_seconds = g.total_wall_time;
  return row;
}

void run_global(const PreparedInstance& p, const GlobalOptions& opts,
                CampaignReport& report) {
  nlohmann::json detail = {{"field", p.spec.label},
                           {"d", p.spec.dim},
                           {"L", p.spec.size},
                           {"delta", p.spec.delta},
                           {"disorder_seed", p.spec.seed},
                           {"instance_file", p.spec.file.string()}};

  auto record = [&](const char* name, const GlobalResult& g) {
    report.rows.push_back(global_row(p, name, g));
    RunEnergies re{p.spec.label, p.spec.delta, name, {}};
    for (const RunRecord& r : g.runs) re.energies.push_back(r.best_energy);
    report.run_energies.push_back(std::move(re));
    detail[name] = {{"best_energy", number_or_null(g.best_energy)},
                    {"best_run", g.best_run},
                    {"total_local_searches", g.total_local_searches},
                    {"gap", number_or_null(g.gap)},
                    {"certificate",
                     {{"epsilon", g.certificate.epsilon},
                      {"regime", to_string(g.certificate.regime)},
                      {"delta1", g.certificate.delta1},
                      {"delta2", g.certificate.delta2},
                      {"gap_bound", number_or_null(g.certificate.gap_bound)}}},
                    {"runs", runs_json(g)}};
  };
  auto failed = [&](const char* name, const std::exception& e) {
    ReportRow row = base_row(p, name);
    row.best_energy = std::numeric_limits<double>::quiet_NaN();
    row.gap = std::numeric_limits<double>::quiet_NaN();
    report.rows.push_back(row);
    detail[name] = {{"error", e.what()}};
  };

  std::optional<GlobalResult> m;
  try {
    m = mbh(p.instance, opts);
    record("MBH", *m);
  } catch (const std::exception& e) {
    failed("MBH", e);
  }
  try {
    GlobalResult ms =
        m ? multistart_matched(p.instance, opts, *m)
          : multistart(p.instance, opts, std::vector<int>(opts.nr, opts.mni + 1));
    record("MS", ms);
  } catch (const std::exception& e) {
    failed("MS", e);
  }
  report.details.push_back(std::move(detail));
}

void run_compare_local(const PreparedInstance& p, const GlobalOptions& opts,
                       int runs, CampaignReport& report) {
  const LocalSolverKind kinds[] = {LocalSolverKind::kRcg, LocalSolverKind::kRtr};
  nlohmann::json detail = {{"field", p.spec.label},
                           {"d", p.spec.dim},
                           {"L", p.spec.size},
                           {"delta", p.spec.delta},
                           {"disorder_seed", p.spec.seed},
                           {"instance_file", p.spec.file.string()}};
  for (LocalSolverKind kind : kinds) {
    const std::string name(to_string(kind));
    LocalSolverFn solve = make_local_solver(kind);
    ReportRow row = base_row(p, name);
    RunEnergies re{p.spec.label, p.spec.delta, name, {}};
    nlohmann::json per_run = nlohmann::json::array();
    double total_time = 0.0;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> ok_energies;
    for (int r = 0; r < runs; ++r) {
      const Spins x0 = random_point(
          p.instance.lattice(),
          derive_seed(opts.master_seed, Stream::kLocalCompare,
                      static_cast<std::uint64_t>(r)));
      LocalResult res;
      try {
        res = solve(x0, p.instance, opts.local_opts);
      } catch (const std::exception&) {
        res.status = Status::kNumericalFailure;
        res.energy = std::numeric_limits<double>::quiet_NaN();
      }
      ++row.local_searches;
      total_time += res.wall_time;
      if (!res.ok()) {
        ++row.failed_searches;
      } else {
        ok_energies.push_back(res.energy);
        best = std::min(best, res.energy);
      }
      re.energies.push_back(res.energy);
      per_run.push_back({{"run", r},
                         {"energy", number_or_null(res.energy)},
                         {"grad_norm", number_or_null(res.grad_norm)},
                         {"iterations", res.iterations},
                         {"status", to_string(res.status)},
                         {"wall_seconds", res.wall_time}});
    }
    row.best_energy = best;
    row.gap = relative_gap(best, row.lower_bound);
    row.distinct_minima = count_distinct(ok_energies);
    row.wall_seconds = runs > 0 ? total_time / runs : 0.0;
    report.rows.push_back(row);
    report.run_energies.push_back(std::move(re));
    detail[name] = {{"runs", per_run}};
  }
  report.details.push_back(std::move(detail));
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{}", v);
}

}  // namespace

Campaign parse_campaign(const KeyValueFile& file,
                        const std::filesystem::path& base_dir) {
  Campaign c;
  apply_options(c.options, file, kCampaignKeys);
  for (const auto& e : file.entries()) {
    try {
      if (e.key == "mode") {
        if (e.value == "global") c.mode = CampaignMode::kGlobal;
        else if (e.value == "compare-local") c.mode = CampaignMode::kCompareLocal;
        else throw std::invalid_argument("mode: expected global or compare-local");
      } else if (e.key == "instance") {
        c.instances.push_back(parse_instance_line(e.value));
      } else if (e.key == "instance_file") {
        std::istringstream ss(e.value);
        std::string path, label;
        ss >> path >> label;
        if (path.empty()) throw std::invalid_argument("instance_file: missing path");
        InstanceSpec s;
        s.file = resolve_path(base_dir, path);
        s.label = label;
        c.instances.push_back(std::move(s));
      } else if (e.key == "local_runs") {
        c.local_runs = std::stoi(e.value);
        if (c.local_runs < 1) throw std::invalid_argument("local_runs must be >= 1");
      } else if (e.key == "instance_dir") {
        c.instance_dir = resolve_path(base_dir, e.value);
      } else if (e.key == "output") {
        c.output = resolve_path(base_dir, e.value);
      }
    } catch (const std::logic_error& err) {
      throw std::invalid_argument(
          fmt::format("{}:{}: {}", file.source(), e.line, err.what()));
    }
  }
  if (!file.get("instance_dir")) c.instance_dir = resolve_path(base_dir, c.instance_dir);
  if (!file.get("output")) c.output = resolve_path(base_dir, c.output);
  if (c.instances.empty()) {
    throw std::invalid_argument(file.source() + ": campaign lists no instances");
  }
  c.options.validate();
  return c;
}

Campaign load_campaign(const std::filesystem::path& path) {
  return parse_campaign(KeyValueFile::load(path), path.parent_path());
}

long count_distinct(std::vector<double> energies, double tol) {
  std::sort(energies.begin(), energies.end());
  long n = 0;
  double last = 0.0;
  for (double e : energies) {
    if (!std::isfinite(e)) continue;
    if (n == 0 || e - last > tol) {
      ++n;
      last = e;
    }
  }
  return n;
}

void flag_winners(std::vector<ReportRow>& rows) {
  using Key = std::tuple<int, int, double, std::string>;
  std::map<Key, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    groups[{r.dim, r.size, r.delta, r.field_label}].push_back(i);
  }
  for (auto& [key, idx] : groups) {
    for (std::size_t i : idx) rows[i].winner = rows[i].fastest = 0;
    if (idx.size() < 2) continue;
    std::size_t best = idx.front();
    std::size_t fast = idx.front();
    for (std::size_t i : idx) {
      if (rows[i].best_energy < rows[best].best_energy) best = i;
      if (rows[i].wall_seconds < rows[fast].wall_seconds) fast = i;
    }
    bool distinct = std::isfinite(rows[best].best_energy);
    for (std::size_t i : idx) {
      if (i == best) continue;
      if (std::isnan(rows[i].best_energy)) continue;
      if (rows[i].best_energy - rows[best].best_energy <= kWinnerTieTolerance) {
        distinct = false;
      }
    }
    if (distinct) rows[best].winner = 1;
    rows[fast].fastest = 1;
  }
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "d",           "L",           "delta",          "field",
      "disorder_seed", "solver",    "best_energy",    "lower_bound",
      "gap",         "local_searches", "failed_searches", "distinct_minima",
      "winner",      "fastest",     "wall_seconds"};
  return cols;
}

std::string to_csv(const std::vector<ReportRow>& rows) {
  std::string out;
  for (std::size_t c = 0; c < csv_columns().size(); ++c) {
    if (c) out += ',';
    out += csv_columns()[c];
  }
  out += '\n';
  for (const ReportRow& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.dim,
                       r.size, csv_number(r.delta), r.field_label,
                       r.disorder_seed, r.solver, csv_number(r.best_energy),
                       csv_number(r.lower_bound), csv_number(r.gap),
                       r.local_searches, r.failed_searches, r.distinct_minima,
                       r.winner, r.fastest, csv_number(r.wall_seconds));
  }
  return out;
}

nlohmann::json to_json(const CampaignReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ReportRow& r : report.rows) {
    rows.push_back({{"d", r.dim},
                    {"L", r.size},
                    {"delta", r.delta},
                    {"field", r.field_label},
                    {"disorder_seed", r.disorder_seed},
                    {"solver", r.solver},
                    {"best_energy", number_or_null(r.best_energy)},
                    {"lower_bound", r.lower_bound},
                    {"gap", number_or_null(r.gap)},
                    {"local_searches", r.local_searches},
                    {"failed_searches", r.failed_searches},
                    {"distinct_minima", r.distinct_minima},
                    {"winner", r.winner},
                    {"fastest", r.fastest},
                    {"wall_seconds", r.wall_seconds}});
  }
  return {{"rows", rows}, {"instances", report.details}};
}

std::string runs_text(const std::vector<RunEnergies>& runs) {
  std::string out = "# field delta solver run energy\n";
  for (const RunEnergies& r : runs) {
    for (std::size_t i = 0; i < r.energies.size(); ++i) {
      out += fmt::format("{} {} {} {} {}\n", r.field_label, csv_number(r.delta),
                         r.solver, i, csv_number(r.energies[i]));
    }
  }
  return out;
}

void write_reports(const CampaignReport& report,
                   const std::filesystem::path& prefix) {
  if (prefix.has_parent_path()) {
    std::filesystem::create_directories(prefix.parent_path());
  }
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
  };
  std::filesystem::path csv = prefix, json = prefix, runs = prefix;
  csv += ".csv";
  json += ".json";
  runs += "_runs.txt";
  write(csv, to_csv(report.rows));
  write(json, to_json(report).dump(1) + "\n");
  write(runs, runs_text(report.run_energies));
}

CampaignReport run_campaign(const Campaign& campaign, std::ostream* log) {
  campaign.options.validate();
  const std::vector<PreparedInstance> prepared = prepare_instances(campaign);
  CampaignReport report;
  report.details = nlohmann::json::array();
  for (const PreparedInstance& p : prepared) {
    const std::size_t first = report.rows.size();
    if (campaign.mode == CampaignMode::kGlobal) {
      run_global(p, campaign.options, report);
    } else {
      run_compare_local(p, campaign.options, campaign.local_runs, report);
    }
    if (log) {
      for (std::size_t i = first; i < report.rows.size(); ++i) {
        const ReportRow& r = report.rows[i];
        *log << fmt::format("L={} delta={} field={} {:>4}  best={:.6f}  "
                            "searches={}  time={:.3f}s\n",
                            r.size, r.delta, r.field_label, r.solver,
                            r.best_energy, r.local_searches, r.wall_seconds);
      }
    }
  }
  flag_winners(report.rows);
  return report;
}

}  // namespace rfxy::harness
