#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rfxy/global_solvers.hpp"
#include "rfxy/harness/config.hpp"

namespace rfxy::harness {

enum class CampaignMode {
  kGlobal,        ///< MBH, then MultiStart on the matched budget
  kCompareLocal,  ///< RTR vs RCG from shared random starts
};

struct InstanceSpec {
  int dim = 3;
  int size = 10;
  double delta = 2.0;
  std::uint64_t seed = 1;
  std::string label;
  /// Explicit instance file; empty means generate from the fields above.
  std::filesystem::path file;
};

struct Campaign {
  CampaignMode mode = CampaignMode::kGlobal;
  std::vector<InstanceSpec> instances;
  GlobalOptions options;
  /// Local solves per solver in compare-local mode.
  int local_runs = 200;
  std::filesystem::path instance_dir = "instances";
  /// Reports go to <output>.csv, <output>.json and <output>_runs.txt.
  std::filesystem::path output = "campaign";
};

/// Campaign file: option keys plus
///   mode = global | compare-local
///   instance = <d> <L> <delta> <seed> [label]     (repeatable)
///   instance_file = <path> [label]                 (repeatable)
///   local_runs = <int>
///   instance_dir = <dir>
///   output = <path prefix>
/// Relative paths resolve against the campaign file's directory.
Campaign load_campaign(const std::filesystem::path& path);
Campaign parse_campaign(const KeyValueFile& file,
                        const std::filesystem::path& base_dir = {});

/// Winner flags use this absolute tie tolerance.
inline constexpr double kWinnerTieTolerance = 1e-6;

struct ReportRow {
  int dim = 0;
  int size = 0;
  double delta = 0.0;
  std::string field_label;
  std::uint64_t disorder_seed = 0;
  std::string solver;
  double best_energy = 0.0;
  double lower_bound = 0.0;
  double gap = 0.0;
  long local_searches = 0;
  long failed_searches = 0;
  long distinct_minima = 0;
  /// 1 if this row's energy beats every other row of the instance by more
  /// than the tie tolerance.
  int winner = 0;
  /// Timing-derived: 1 for the lowest wall time of the instance.
  int fastest = 0;
  double wall_seconds = 0.0;
};

/// Energies of every local solve (compare-local) or run (global).
struct RunEnergies {
  std::string field_label;
  double delta = 0.0;
  std::string solver;
  std::vector<double> energies;
};

struct CampaignReport {
  std::vector<ReportRow> rows;
  std::vector<RunEnergies> run_energies;
  nlohmann::json details;  ///< per-instance, per-run records
};

/// Generates/loads every instance first, then runs each in turn. Solver
/// failures are recorded per row. Progress goes to `log` when non-null.
CampaignReport run_campaign(const Campaign& campaign, std::ostream* log = nullptr);

/// Number of energies that differ pairwise by more than `tol` after sorting.
long count_distinct(std::vector<double> energies, double tol = kWinnerTieTolerance);

/// Sets winner and fastest flags within each group of rows sharing an
/// instance (dim, size, delta, field label).
void flag_winners(std::vector<ReportRow>& rows);

std::string to_csv(const std::vector<ReportRow>& rows);
nlohmann::json to_json(const CampaignReport& report);
std::string runs_text(const std::vector<RunEnergies>& runs);

/// Writes <prefix>.csv, <prefix>.json and <prefix>_runs.txt.
void write_reports(const CampaignReport& report,
                   const std::filesystem::path& prefix);

/// CSV column names, in order. Columns named wall_seconds and fastest depend
/// on timing.
const std::vector<std::string>& csv_columns();

}  // namespace rfxy::harness
