#include "opnorm/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "opnorm/errors.hpp"
#include "opnorm/util.hpp"

namespace opnorm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError("field '" + key + "': " + why);
}

double to_real(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || !std::isfinite(x)) bad(key, "expected a finite number, got '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || v[0] == '-' || *end != '\0' || errno == ERANGE) {
    bad(key, "expected a non-negative integer, got '" + v + "'");
  }
  return x;
}

double positive(const std::string& key, const std::string& v) {
  const double x = to_real(key, v);
  if (!(x > 0.0)) bad(key, "must be > 0, got " + v);
  return x;
}

std::uint64_t at_least(const std::string& key, const std::string& v, std::uint64_t lo) {
  const auto x = to_u64(key, v);
  if (x < lo) bad(key, "must be >= " + std::to_string(lo) + ", got " + v);
  return x;
}

std::string one_of(const std::string& key, const std::string& v,
                   std::initializer_list<const char*> options) {
  for (const char* o : options)
    if (v == o) return v;
  std::string list;
  for (const char* o : options) list += (list.empty() ? "" : "|") + std::string(o);
  bad(key, "expected one of " + list + ", got '" + v + "'");
}

std::vector<std::string> tokens(const std::string& v) {
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "subcommand", "ensemble", "dist",     "sigma",     "half_width", "cap",     "dof",
      "load",       "mixer",    "mixer_seed", "n",       "n_grid",     "A",       "A_grid",
      "eps",        "trials",   "rtol",     "max_iter",  "saturation_T", "dim",   "probes",
      "width_c",    "u_mode",   "p_max",    "samples",   "psi2_b",     "norm_kind", "method",
      "master_seed", "output",  "csv",      "input"};
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "subcommand") {
    subcommand = one_of(key, v, {"gen", "norm", "net", "tails", "sweep", "decay", "diag", "tw"});
  } else if (key == "ensemble") {
    ensemble = one_of(key, v, {"iid", "rows", "ones"});
  } else if (key == "dist") {
    dist = one_of(key, v, {"gaussian", "rademacher", "uniform", "trunc_gaussian", "student_t"});
  } else if (key == "sigma") {
    sigma = positive(key, v);
  } else if (key == "half_width") {
    half_width = positive(key, v);
  } else if (key == "cap") {
    cap = positive(key, v);
  } else if (key == "dof") {
    dof = positive(key, v);
  } else if (key == "load") {
    load = to_real(key, v);
    if (!(load >= 0.0 && load < 1.0)) bad(key, "must lie in [0, 1), got " + v);
  } else if (key == "mixer") {
    mixer = one_of(key, v, {"identity", "rotation", "common_factor"});
  } else if (key == "mixer_seed") {
    mixer_seed = to_u64(key, v);
  } else if (key == "n") {
    n = at_least(key, v, 1);
  } else if (key == "n_grid") {
    n_grid.clear();
    for (const auto& t : tokens(v)) n_grid.push_back(at_least(key, t, 1));
    if (n_grid.empty()) bad(key, "must list at least one size");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
      if (n_grid[i] <= n_grid[i - 1]) bad(key, "must be strictly increasing");
  } else if (key == "A") {
    A = positive(key, v);
  } else if (key == "A_grid") {
    A_grid.clear();
    for (const auto& t : tokens(v)) A_grid.push_back(positive(key, t));
    if (A_grid.empty()) bad(key, "must list at least one value");
  } else if (key == "eps") {
    eps = to_real(key, v);
    if (!(eps > 0.0 && eps < 2.0)) bad(key, "must lie in (0, 2), got " + v);
  } else if (key == "trials") {
    trials = at_least(key, v, 1);
  } else if (key == "rtol") {
    rtol = positive(key, v);
  } else if (key == "max_iter") {
    const auto x = at_least(key, v, 1);
    if (x > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) bad(key, "too large");
    max_iter = static_cast<int>(x);
  } else if (key == "saturation_T") {
    saturation_T = at_least(key, v, 1);
  } else if (key == "dim") {
    dim = at_least(key, v, 2);
  } else if (key == "probes") {
    probes = to_u64(key, v);
  } else if (key == "width_c") {
    width_c = to_real(key, v);
    if (width_c < 0.0) bad(key, "must be >= 0, got " + v);
  } else if (key == "u_mode") {
    u_mode = one_of(key, v, {"first_basis", "uniform_diagonal", "seeded_random"});
  } else if (key == "p_max") {
    const auto x = at_least(key, v, 1);
    if (x > 20) bad(key, "must be <= 20, got " + v);
    p_max = static_cast<int>(x);
  } else if (key == "samples") {
    samples = at_least(key, v, 1);
  } else if (key == "psi2_b") {
    psi2_b = positive(key, v);
  } else if (key == "norm_kind") {
    norm_kind = one_of(key, v, {"spectral", "one", "inf", "all"});
  } else if (key == "method") {
    method = one_of(key, v, {"auto", "exact", "power"});
  } else if (key == "master_seed") {
    master_seed = to_u64(key, v);
  } else if (key == "output") {
    output = v;
  } else if (key == "csv") {
    csv = v;
  } else if (key == "input") {
    input = v;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

void RunConfig::validate() const {
  if (subcommand == "sweep" && n_grid.size() < 3) {
    throw ConfigError("field 'n_grid': sweep needs at least 3 sizes");
  }
  if (subcommand == "decay" && n_grid.size() < 2) {
    throw ConfigError("field 'n_grid': decay needs at least 2 sizes");
  }
  if (subcommand == "diag" && input.empty()) {
    if (samples < 10'000) throw ConfigError("field 'samples': must be >= 10000");
  }
  if ((subcommand == "norm" || subcommand == "gen") && method == "exact" &&
      n > kExactNormMaxDim) {
    throw ConfigError("field 'n': exact method supports n <= " + std::to_string(kExactNormMaxDim));
  }
  // Reject laws that would fail inside the generator, naming the field.
  (void)ensemble_spec();
}

EnsembleSpec RunConfig::ensemble_spec() const {
  ScalarDist d;
  if (dist == "gaussian") {
    d = Gaussian{sigma};
  } else if (dist == "rademacher") {
    d = Rademacher{};
  } else if (dist == "uniform") {
    d = UniformSym{half_width};
  } else if (dist == "trunc_gaussian") {
    d = TruncGaussian{sigma, cap};
  } else {
    d = StudentT{dof};
  }
  if (ensemble == "ones") return AllOnes{};
  if (ensemble == "iid") return IidEntries{d};
  RowMixer m;
  if (mixer == "identity") {
    m = IdentityMixer{};
  } else if (mixer == "rotation") {
    m = FixedRotation{mixer_seed};
  } else {
    m = CommonFactor{load};
  }
  return IndependentRows{d, m};
}

UMode RunConfig::u_mode_value() const {
  if (u_mode == "first_basis") return UMode::FirstBasis;
  if (u_mode == "uniform_diagonal") return UMode::UniformDiagonal;
  return UMode::SeededRandom;
}

KeyValues RunConfig::echo() const {
  KeyValues kv;
  kv.emplace_back("subcommand", subcommand);
  kv.emplace_back("ensemble", ensemble);
  kv.emplace_back("dist", dist);
  kv.emplace_back("sigma", format_real(sigma));
  kv.emplace_back("half_width", format_real(half_width));
  kv.emplace_back("cap", format_real(cap));
  kv.emplace_back("dof", format_real(dof));
  kv.emplace_back("load", format_real(load));
  kv.emplace_back("mixer", mixer);
  kv.emplace_back("mixer_seed", std::to_string(mixer_seed));
  kv.emplace_back("n", std::to_string(n));
  kv.emplace_back("n_grid", join_sizes(n_grid));
  kv.emplace_back("A", format_real(A));
  kv.emplace_back("A_grid", join_reals(A_grid));
  kv.emplace_back("eps", format_real(eps));
  kv.emplace_back("trials", std::to_string(trials));
  kv.emplace_back("rtol", format_real(rtol));
  kv.emplace_back("max_iter", std::to_string(max_iter));
  kv.emplace_back("saturation_T", std::to_string(saturation_T));
  kv.emplace_back("dim", std::to_string(dim));
  kv.emplace_back("probes", std::to_string(probes));
  kv.emplace_back("width_c", format_real(width_c));
  kv.emplace_back("u_mode", u_mode);
  kv.emplace_back("p_max", std::to_string(p_max));
  kv.emplace_back("samples", std::to_string(samples));
  kv.emplace_back("psi2_b", format_real(psi2_b));
  kv.emplace_back("norm_kind", norm_kind);
  kv.emplace_back("method", method);
  if (master_seed) kv.emplace_back("master_seed", std::to_string(*master_seed));
  if (!input.empty()) kv.emplace_back("input", input);
  // output/csv are destinations, not inputs to the computation; not echoed.
  return kv;
}

RunConfig parse_config(const std::string& text, RunConfig base, const std::string& origin) {
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  bool sectioned = text.find("\n[") != std::string::npos || text.rfind('[', 0) == 0;
  std::string section;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = t.substr(1, t.size() - 2);
      continue;
    }
    if (sectioned && section != "config") continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": parse error: expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    try {
      base.set(key, t.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), std::move(base), path);
}

}  // namespace opnorm
