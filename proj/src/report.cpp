#include "opnorm/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
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

double parse_real(const std::string& tok) {
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') throw DataError("not a number: '" + tok + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& tok) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
  if (tok.empty() || end == tok.c_str() || *end != '\0' || tok[0] == '-') {
    throw DataError("not a non-negative integer: '" + tok + "'");
  }
  return v;
}

std::string real(double v) { return format_real(v); }

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw DataError("not a boolean: '" + s + "'");
}

}  // namespace

std::string artifact_version() { return OPNORM_VERSION; }

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

const std::string& lookup(const KeyValues& kv, const std::string& key) {
  for (const auto& [k, v] : kv)
    if (k == key) return v;
  throw DataError("missing key '" + key + "'");
}

std::string join_reals(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + real(v[i]);
  return out;
}

std::string join_sizes(std::span<const std::size_t> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out;
}

std::vector<double> split_reals(const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(parse_real(tok));
  return out;
}

std::vector<std::size_t> split_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(static_cast<std::size_t>(parse_u64(tok)));
  return out;
}

std::string render_report(const ExperimentReport& r) {
  std::ostringstream os;
  os << "schema_version = " << r.schema_version << '\n';
  os << "artifact_version = " << r.artifact_version << '\n';
  os << "master_seed = " << r.master_seed << '\n';
  if (!r.timestamp.empty()) os << "timestamp = " << r.timestamp << '\n';
  os << "\n[config]\n";
  for (const auto& [k, v] : r.config) os << k << " = " << v << '\n';
  os << "\n[payload]\n";
  for (const auto& [k, v] : r.payload) os << k << " = " << v << '\n';
  return os.str();
}

void write_report(const ExperimentReport& report, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open report for writing: " + path);
  os << render_report(report);
  os.flush();
  if (!os) throw IoError("failed writing report: " + path);
}

ExperimentReport parse_report(const std::string& text) {
  ExperimentReport r;
  r.artifact_version.clear();
  std::istringstream is(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = t.substr(1, t.size() - 2);
      if (section != "config" && section != "payload") {
        throw DataError("report line " + std::to_string(lineno) + ": unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw DataError("report line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (section == "config") {
      r.config.emplace_back(std::move(key), std::move(value));
    } else if (section == "payload") {
      r.payload.emplace_back(std::move(key), std::move(value));
    } else if (key == "schema_version") {
      r.schema_version = static_cast<int>(parse_u64(value));
    } else if (key == "artifact_version") {
      r.artifact_version = value;
    } else if (key == "master_seed") {
      r.master_seed = parse_u64(value);
    } else if (key == "timestamp") {
      r.timestamp = value;
    } else {
      throw DataError("report line " + std::to_string(lineno) + ": unknown header key '" + key + "'");
    }
  }
  return r;
}

ExperimentReport read_report(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open report: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_report(ss.str());
}

KeyValues payload_of(std::span<const TailEstimate> est, const std::string& kind) {
  std::vector<double> A, p, lo, hi;
  std::vector<std::size_t> n, trials, hits;
  for (const auto& e : est) {
    A.push_back(e.A);
    n.push_back(e.n);
    trials.push_back(e.trials);
    hits.push_back(e.hits);
    p.push_back(e.p_hat);
    lo.push_back(e.ci_low);
    hi.push_back(e.ci_high);
  }
  return {{"kind", kind},          {"A", join_reals(A)},       {"n", join_sizes(n)},
          {"trials", join_sizes(trials)}, {"hits", join_sizes(hits)}, {"p_hat", join_reals(p)},
          {"ci_low", join_reals(lo)},     {"ci_high", join_reals(hi)}};
}

std::vector<TailEstimate> tail_estimates_from(const KeyValues& kv, const std::string& prefix) {
  const auto A = split_reals(lookup(kv, prefix + "A"));
  const auto n = split_sizes(lookup(kv, prefix + "n"));
  const auto trials = split_sizes(lookup(kv, prefix + "trials"));
  const auto hits = split_sizes(lookup(kv, prefix + "hits"));
  const auto p = split_reals(lookup(kv, prefix + "p_hat"));
  const auto lo = split_reals(lookup(kv, prefix + "ci_low"));
  const auto hi = split_reals(lookup(kv, prefix + "ci_high"));
  const std::size_t k = A.size();
  if (n.size() != k || trials.size() != k || hits.size() != k || p.size() != k || lo.size() != k ||
      hi.size() != k) {
    throw DataError("tail estimate lists have inconsistent lengths");
  }
  std::vector<TailEstimate> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back({A[i], n[i], trials[i], hits[i], p[i], lo[i], hi[i]});
  return out;
}

KeyValues payload_of(const GrowthFit& fit) {
  return {{"kind", "growth_fit"},
          {"n_grid", join_sizes(fit.n_grid)},
          {"mean_norms", join_reals(fit.mean_norms)},
          {"slope", real(fit.slope)},
          {"intercept", real(fit.intercept)},
          {"residual_max", real(fit.residual_max)}};
}

GrowthFit growth_fit_from(const KeyValues& kv) {
  GrowthFit fit;
  fit.n_grid = split_sizes(lookup(kv, "n_grid"));
  fit.mean_norms = split_reals(lookup(kv, "mean_norms"));
  fit.slope = parse_real(lookup(kv, "slope"));
  fit.intercept = parse_real(lookup(kv, "intercept"));
  fit.residual_max = parse_real(lookup(kv, "residual_max"));
  return fit;
}

KeyValues payload_of(const DecayCertificate& cert) {
  KeyValues kv{{"kind", "decay_certificate"}};
  for (auto& entry : payload_of(cert.estimates, "")) {
    if (entry.first != "kind") kv.emplace_back("estimate." + entry.first, entry.second);
  }
  kv.emplace_back("A", real(cert.A));
  kv.emplace_back("n_grid", join_sizes(cert.n_grid));
  kv.emplace_back("neg_log_p", join_reals(cert.neg_log_p));
  std::string censored;
  for (std::size_t i = 0; i < cert.censored.size(); ++i) censored += (i ? " " : "") + std::string(cert.censored[i] ? "1" : "0");
  kv.emplace_back("censored", censored);
  kv.emplace_back("c_hat", real(cert.c_hat));
  kv.emplace_back("C_hat", real(cert.C_hat));
  kv.emplace_back("monotone", cert.monotone ? "true" : "false");
  kv.emplace_back("degenerate", cert.degenerate ? "true" : "false");
  kv.emplace_back("note",
                  "exponent fitted against n at fixed A; dependence on A versus A^2 not assessed");
  return kv;
}

DecayCertificate decay_certificate_from(const KeyValues& kv) {
  DecayCertificate cert;
  cert.estimates = tail_estimates_from(kv, "estimate.");
  cert.A = parse_real(lookup(kv, "A"));
  cert.n_grid = split_sizes(lookup(kv, "n_grid"));
  cert.neg_log_p = split_reals(lookup(kv, "neg_log_p"));
  for (std::size_t c : split_sizes(lookup(kv, "censored"))) cert.censored.push_back(c != 0);
  cert.c_hat = parse_real(lookup(kv, "c_hat"));
  cert.C_hat = parse_real(lookup(kv, "C_hat"));
  cert.monotone = parse_bool(lookup(kv, "monotone"));
  cert.degenerate = parse_bool(lookup(kv, "degenerate"));
  return cert;
}

std::string render_sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream os;
  os << "n,mean_norm,p_hat,ci_low,ci_high,trials\n";
  for (const auto& r : rows) {
    os << r.n << ',' << real(r.mean_norm) << ',' << real(r.tail.p_hat) << ','
       << real(r.tail.ci_low) << ',' << real(r.tail.ci_high) << ',' << r.tail.trials << '\n';
  }
  return os.str();
}

void write_sweep_csv(std::span<const SweepRow> rows, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open CSV for writing: " + path);
  os << render_sweep_csv(rows);
  os.flush();
  if (!os) throw IoError("failed writing CSV: " + path);
}

}  // namespace opnorm
