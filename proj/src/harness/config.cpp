#include "rfxy/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <stdexcept>

#include <fmt/format.h>

namespace rfxy::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument("option '" + key + "': cannot parse '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw std::invalid_argument("option '" + key + "': expected a boolean, got '" +
                              value + "'");
}

CgBetaRule parse_beta(const std::string& value) {
  if (value == "pr_plus") return CgBetaRule::kPolakRibierePlus;
  if (value == "fletcher_reeves") return CgBetaRule::kFletcherReeves;
  if (value == "hestenes_stiefel") return CgBetaRule::kHestenesStiefel;
  throw std::invalid_argument("cg_beta_rule: unknown rule '" + value + "'");
}

std::string_view beta_name(CgBetaRule r) {
  switch (r) {
    case CgBetaRule::kPolakRibierePlus: return "pr_plus";
    case CgBetaRule::kFletcherReeves: return "fletcher_reeves";
    case CgBetaRule::kHestenesStiefel: return "hestenes_stiefel";
  }
  return "pr_plus";
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& in, std::string source) {
  KeyValueFile f;
  f.source_ = std::move(source);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(fmt::format("{}:{}: expected 'key = value'",
                                              f.source_, lineno));
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument(fmt::format("{}:{}: empty key", f.source_, lineno));
    }
    f.entries_.push_back({std::move(key), std::move(value), lineno});
  }
  return f;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  return parse(in, path.string());
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->key == key) return it->value;
  }
  return std::nullopt;
}

std::vector<std::string> KeyValueFile::get_all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (e.key == key) out.push_back(e.value);
  }
  return out;
}

bool apply_option(GlobalOptions& o, const std::string& key,
                  const std::string& value) {
  SolverOptions& s = o.local_opts;
  LineSearchOptions& ls = s.line_search;
  if (key == "grad_tol") s.grad_tol = parse_number<double>(key, value);
  else if (key == "max_iters") s.max_iters = parse_number<int>(key, value);
  else if (key == "tr_initial_radius") s.tr_initial_radius = parse_number<double>(key, value);
  else if (key == "tr_max_radius") s.tr_max_radius = parse_number<double>(key, value);
  else if (key == "tr_accept_ratio") s.tr_accept_ratio = parse_number<double>(key, value);
  else if (key == "tr_expand_ratio") s.tr_expand_ratio = parse_number<double>(key, value);
  else if (key == "tr_shrink_ratio") s.tr_shrink_ratio = parse_number<double>(key, value);
  else if (key == "tr_max_rejections") s.tr_max_rejections = parse_number<int>(key, value);
  else if (key == "tcg_kappa") s.tcg_kappa = parse_number<double>(key, value);
  else if (key == "tcg_theta") s.tcg_theta = parse_number<double>(key, value);
  else if (key == "tcg_max_inner") s.tcg_max_inner = parse_number<int>(key, value);
  else if (key == "cg_beta_rule") s.cg_beta_rule = parse_beta(value);
  else if (key == "armijo_c") ls.sufficient_decrease = parse_number<double>(key, value);
  else if (key == "armijo_factor") ls.contraction = parse_number<double>(key, value);
  else if (key == "armijo_initial_step") ls.initial_step = parse_number<double>(key, value);
  else if (key == "armijo_max_backtracks") ls.max_backtracks = parse_number<int>(key, value);
  else if (key == "checked") s.checked = parse_bool(key, value);
  else if (key == "nr") o.nr = parse_number<int>(key, value);
  else if (key == "mni") o.mni = parse_number<int>(key, value);
  else if (key == "eta_max") o.eta_max = parse_number<double>(key, value);
  else if (key == "eta_convention") o.eta_convention = parse_eta_convention(value);
  else if (key == "local_solver") o.local_solver = parse_local_solver(value);
  else if (key == "master_seed") o.master_seed = parse_number<std::uint64_t>(key, value);
  else if (key == "budget_mode") o.budget_mode = parse_budget_mode(value);
  else if (key == "threads") o.threads = parse_number<int>(key, value);
  else if (key == "certificate_epsilon") o.certificate_epsilon = parse_number<double>(key, value);
  else return false;
  return true;
}

void apply_options(GlobalOptions& opts, const KeyValueFile& file,
                   const std::vector<std::string>& extra) {
  for (const auto& e : file.entries()) {
    try {
      if (apply_option(opts, e.key, e.value)) continue;
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument(
          fmt::format("{}:{}: {}", file.source(), e.line, err.what()));
    }
    if (std::find(extra.begin(), extra.end(), e.key) == extra.end()) {
      throw std::invalid_argument(
          fmt::format("{}:{}: unknown key '{}'", file.source(), e.line, e.key));
    }
  }
}

GlobalOptions load_options(const std::filesystem::path& path) {
  GlobalOptions o;
  apply_options(o, KeyValueFile::load(path));
  o.validate();
  return o;
}

std::string dump_options(const GlobalOptions& o) {
  const SolverOptions& s = o.local_opts;
  const LineSearchOptions& ls = s.line_search;
  std::string out;
  auto kv = [&out](std::string_view k, const auto& v) {
    out += fmt::format("{} = {}\n", k, v);
  };
  out += "# global\n";
  kv("nr", o.nr);
  kv("mni", o.mni);
  kv("eta_max", o.eta_max);
  kv("eta_convention", to_string(o.eta_convention));
  kv("local_solver", to_string(o.local_solver));
  kv("master_seed", o.master_seed);
  kv("budget_mode", to_string(o.budget_mode));
  kv("threads", o.threads);
  kv("certificate_epsilon", o.certificate_epsilon);
  out += "# local solvers (radius <= 0 selects sqrt(n_sites) and max/8)\n";
  kv("grad_tol", s.grad_tol);
  kv("max_iters", s.max_iters);
  kv("tr_initial_radius", s.tr_initial_radius);
  kv("tr_max_radius", s.tr_max_radius);
  kv("tr_accept_ratio", s.tr_accept_ratio);
  kv("tr_expand_ratio", s.tr_expand_ratio);
  kv("tr_shrink_ratio", s.tr_shrink_ratio);
  kv("tr_max_rejections", s.tr_max_rejections);
  kv("tcg_kappa", s.tcg_kappa);
  kv("tcg_theta", s.tcg_theta);
  kv("tcg_max_inner", s.tcg_max_inner);
  kv("cg_beta_rule", beta_name(s.cg_beta_rule));
  kv("armijo_c", ls.sufficient_decrease);
  kv("armijo_factor", ls.contraction);
  kv("armijo_initial_step", ls.initial_step);
  kv("armijo_max_backtracks", ls.max_backtracks);
  kv("checked", s.checked ? "true" : "false");
  return out;
}

std::optional<int> threads_from_env() {
  const char* v = std::getenv("RFXY_THREADS");
  if (v == nullptr || *v == '\0') return std::nullopt;
  int n = 0;
  const char* end = v + std::char_traits<char>::length(v);
  auto [ptr, ec] = std::from_chars(v, end, n);
  if (ec != std::errc() || ptr != end || n < 1) return std::nullopt;
  return n;
}

}  // namespace rfxy::harness
