#include "opnorm/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>

#include "opnorm/config.hpp"
#include "opnorm/diagnostics.hpp"
#include "opnorm/epsnet.hpp"
#include "opnorm/errors.hpp"
#include "opnorm/experiments.hpp"
#include "opnorm/report.hpp"
#include "opnorm/specnorm.hpp"
#include "opnorm/util.hpp"

namespace opnorm::cli {

namespace {

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error("usage", what) {}
};

// Human-facing number: 15 significant digits, so exact integers print as such.
std::string show(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string flag_name(const std::string& key) {
  if (key == "master_seed") return "--seed";
  if (key == "saturation_T") return "--saturation";
  if (key == "output") return "--out";
  if (key == "norm_kind") return "--kind";
  std::string f = "--" + key;
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

struct Flags {
  std::map<std::string, std::string> values;  // config key -> raw value
  std::string config_path;
  unsigned threads = 0;
  bool ones = false;
};

void add_flags(CLI::App* sub, Flags& flags) {
  for (const auto& key : config_keys()) {
    if (key == "subcommand") continue;
    sub->add_option_function<std::string>(
        flag_name(key), [&flags, key](const std::string& v) { flags.values[key] = v; },
        "sets '" + key + "'");
  }
  sub->add_option("--config", flags.config_path, "key = value config file (flags override it)");
  sub->add_option("--threads", flags.threads, "worker threads (0 = all cores)");
  sub->add_flag("--ones", flags.ones, "shorthand for --ensemble ones");
}

bool needs_seed(const RunConfig& cfg) {
  const auto& s = cfg.subcommand;
  if (s == "gen" || s == "norm") return cfg.ensemble != "ones";
  if (s == "diag") return cfg.input.empty();
  return true;
}

ExperimentReport make_report(const RunConfig& cfg, KeyValues payload) {
  ExperimentReport r;
  r.artifact_version = artifact_version();
  r.master_seed = cfg.master_seed.value_or(0);
  r.timestamp = utc_timestamp();
  r.config = cfg.echo();
  r.payload = std::move(payload);
  return r;
}

void emit_report(const RunConfig& cfg, const ExperimentReport& r, std::ostream& out) {
  if (!cfg.output.empty()) {
    write_report(r, cfg.output);
    out << "report=" << cfg.output << '\n';
  }
}

void write_matrix(std::ostream& os, const Matrix& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) os << (j ? " " : "") << format_real(r[j]);
    os << '\n';
  }
}

Matrix matrix_for(const RunConfig& cfg) {
  return sample_matrix(cfg.ensemble_spec(), cfg.n, cfg.n, cfg.master_seed.value_or(0));
}

int cmd_gen(const RunConfig& cfg, std::ostream& out) {
  const Matrix m = matrix_for(cfg);
  if (cfg.output.empty()) {
    write_matrix(out, m);
  } else {
    std::ofstream os(cfg.output);
    if (!os) throw IoError("cannot open matrix file for writing: " + cfg.output);
    write_matrix(os, m);
    if (!os) throw IoError("failed writing matrix file: " + cfg.output);
    out << "matrix=" << cfg.output << '\n';
  }
  return kExitOk;
}

double spectral(const RunConfig& cfg, const Matrix& m) {
  const bool exact = cfg.method == "exact" || (cfg.method == "auto" && cfg.n <= kExactBackendMaxN);
  if (exact) return opnorm_exact(m);
  return opnorm_power(m, cfg.rtol, cfg.max_iter).value;
}

int cmd_norm(const RunConfig& cfg, std::ostream& out) {
  const Matrix m = matrix_for(cfg);
  KeyValues payload{{"kind", "norm"}};
  auto emit = [&](const std::string& name, double v, bool labelled) {
    out << (labelled ? name + "=" : "") << show(v) << '\n';
    payload.emplace_back(name, format_real(v));
  };
  const bool all = cfg.norm_kind == "all";
  if (all || cfg.norm_kind == "spectral") emit("spectral", spectral(cfg, m), all);
  if (all || cfg.norm_kind == "one") emit("one", opnorm_closed(m, NormKind::One), all);
  if (all || cfg.norm_kind == "inf") emit("inf", opnorm_closed(m, NormKind::Inf), all);
  emit_report(cfg, make_report(cfg, payload), out);
  return kExitOk;
}

int cmd_net(const RunConfig& cfg, std::ostream& out) {
  EpsNet net = build_net(cfg.dim, cfg.eps, *cfg.master_seed, cfg.saturation_T);
  const double min_dist = min_pairwise_distance(net);
  const bool separated = net.size() < 2 || min_dist >= cfg.eps - 1e-12;
  const auto bounds = cardinality_bounds(cfg.dim, cfg.eps);
  out << "cardinality=" << net.size() << '\n';
  out << "min_distance=" << show(min_dist) << '\n';
  out << "separation=" << (separated ? "pass" : "fail") << '\n';
  out << "packing_ratio=" << show(bounds.packing_ratio) << '\n';
  if (cfg.probes > 0) {
    out << "audit_coverage=" << show(audit_coverage_check(net, cfg.probes, *cfg.master_seed + 1))
        << '\n';
  }
  if (!cfg.output.empty()) {
    write_net(cfg.output, net);
    out << "net=" << cfg.output << '\n';
  }
  return separated ? kExitOk : kExitRuntime;
}

int cmd_tails(const RunConfig& cfg, std::ostream& out, const ExecOptions& exec) {
  const auto spec = cfg.ensemble_spec();
  const auto seed = *cfg.master_seed;
  const auto op = tail_curve(spec, cfg.n, cfg.A_grid, cfg.trials, seed, exec);
  const auto fixed = fixed_vector_curve(spec, cfg.n, cfg.u_mode_value(), cfg.A_grid, cfg.trials, seed, exec);
  KeyValues payload = payload_of(op, "tail_estimates");
  for (auto& [k, v] : payload_of(fixed, "")) {
    if (k != "kind") payload.emplace_back("fixed." + k, v);
  }
  out << "A,p_hat_opnorm,ci_low,ci_high,p_hat_fixed_vector\n";
  for (std::size_t i = 0; i < op.size(); ++i) {
    out << show(op[i].A) << ',' << show(op[i].p_hat) << ',' << show(op[i].ci_low) << ','
        << show(op[i].ci_high) << ',' << show(fixed[i].p_hat) << '\n';
  }
  emit_report(cfg, make_report(cfg, payload), out);
  return kExitOk;
}

void emit_rows(const RunConfig& cfg, const std::vector<SweepRow>& rows, std::ostream& out) {
  if (!cfg.csv.empty()) {
    write_sweep_csv(rows, cfg.csv);
    out << "csv=" << cfg.csv << '\n';
  } else {
    out << render_sweep_csv(rows);
  }
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, const ExecOptions& exec) {
  const auto rows = sweep_rows(cfg.ensemble_spec(), cfg.n_grid, cfg.A, cfg.trials, *cfg.master_seed, exec);
  const auto fit = growth_fit_of(rows);
  emit_rows(cfg, rows, out);
  out << "slope=" << show(fit.slope) << '\n';
  emit_report(cfg, make_report(cfg, payload_of(fit)), out);
  return kExitOk;
}

int cmd_decay(const RunConfig& cfg, std::ostream& out, const ExecOptions& exec) {
  const auto rows = sweep_rows(cfg.ensemble_spec(), cfg.n_grid, cfg.A, cfg.trials, *cfg.master_seed, exec);
  const auto cert = decay_certificate_of(cfg.A, rows);
  emit_rows(cfg, rows, out);
  out << "c_hat=" << show(cert.c_hat) << '\n'
      << "C_hat=" << show(cert.C_hat) << '\n'
      << "monotone=" << (cert.monotone ? "true" : "false") << '\n'
      << "degenerate=" << (cert.degenerate ? "true" : "false") << '\n';
  emit_report(cfg, make_report(cfg, payload_of(cert)), out);
  return kExitOk;
}

int cmd_diag(const RunConfig& cfg, std::ostream& out) {
  const auto spec = cfg.ensemble_spec();
  ScalarDist dist = Gaussian{};
  if (const auto* iid = std::get_if<IidEntries>(&spec)) dist = iid->dist;
  if (const auto* rows = std::get_if<IndependentRows>(&spec)) dist = rows->base;
  const auto samples =
      cfg.input.empty() ? draw_samples(dist, cfg.samples, *cfg.master_seed) : read_samples(cfg.input);

  KeyValues payload{{"kind", "diagnostics"}};
  try {
    const TailFit fit = fit_tail_params(samples);
    payload.emplace_back("B_hat", format_real(fit.B_hat));
    payload.emplace_back("b_hat", format_real(fit.b_hat));
    payload.emplace_back("r_squared", format_real(fit.r_squared));
    payload.emplace_back("curvature", format_real(fit.curvature));
  } catch (const InsufficientTailError& e) {
    payload.emplace_back("tail_fit", std::string("insufficient tail: ") + e.what());
  }
  const Verdict verdict = diagnose_samples(samples);
  const MomentProfile prof = moment_ratio_profile(samples, cfg.p_max);
  payload.emplace_back("K_hat", format_real(prof.K_hat));
  payload.emplace_back("moment_ratios", join_reals(prof.ratios));
  if (cfg.input.empty() && !std::holds_alternative<StudentT>(dist)) {
    // Reference constants for the moment condition, recorded but not asserted.
    const double s = tail_params_of(dist).sigma;
    payload.emplace_back("K_reference_sigma_exp_inv_e", format_real(s * std::exp(1.0 / std::exp(1.0))));
    payload.emplace_back("K_reference_sigma_sqrt_2pi", format_real(s * std::sqrt(2.0 * M_PI)));
  }
  const Psi2Estimate psi2 = psi2_estimate(samples, cfg.psi2_b);
  payload.emplace_back("psi2", format_real(psi2.value));
  payload.emplace_back("psi2_diverged", psi2.diverged ? "true" : "false");
  payload.emplace_back("verdict", verdict.accept ? "accept" : "reject");
  payload.emplace_back("reason", verdict.reason);
  for (const auto& [k, v] : payload)
    if (k != "kind") out << k << '=' << v << '\n';
  emit_report(cfg, make_report(cfg, payload), out);
  return kExitOk;
}

int cmd_tw(const RunConfig& cfg, std::ostream& out, const ExecOptions& exec) {
  const double frac = tw_window_fraction(cfg.n, cfg.trials, cfg.width_c, *cfg.master_seed, exec);
  out << "fraction=" << show(frac) << '\n';
  KeyValues payload{{"kind", "tw_window"},
                    {"n", std::to_string(cfg.n)},
                    {"trials", std::to_string(cfg.trials)},
                    {"width_c", format_real(cfg.width_c)},
                    {"fraction", format_real(frac)}};
  emit_report(cfg, make_report(cfg, payload), out);
  return kExitOk;
}

bool is_usage_kind(const std::string& kind) {
  return kind == "usage" || kind == "config" || kind == "parameter" || kind == "scale" ||
         kind == "kind" || kind == "shape" || kind == "normalization" ||
         kind == "not_subgaussian" || kind == "degenerate_ensemble";
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Operator-norm concentration laboratory", "opnorm"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> subcommands = {
      {"gen", "sample a matrix from an ensemble"},
      {"norm", "operator norms of a sampled matrix"},
      {"net", "build and audit a maximal eps-net on the sphere"},
      {"tails", "tail probabilities of ||M|| and ||Mu|| over an A grid"},
      {"sweep", "mean operator norm growth over an n grid"},
      {"decay", "exceedance decay certificate over an n grid"},
      {"diag", "sub-Gaussian diagnostics of a scalar law or sample file"},
      {"tw", "fraction of sigma_max inside the 2 sqrt(n) edge window"}};
  for (const auto& [name, help] : subcommands) add_flags(app.add_subcommand(name, help), flags);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << '\n';
    return kExitUsage;
  }

  RunConfig cfg;
  try {
    const std::string sub = app.get_subcommands().front()->get_name();
    if (!flags.config_path.empty()) cfg = load_config(flags.config_path);
    if (!cfg.subcommand.empty() && cfg.subcommand != sub) {
      throw ConfigError("config is for subcommand '" + cfg.subcommand + "', not '" + sub + "'");
    }
    cfg.subcommand = sub;
    for (const auto& [key, value] : flags.values) cfg.set(key, value);
    if (flags.ones) cfg.ensemble = "ones";
    cfg.validate();
    if (needs_seed(cfg) && !cfg.master_seed) {
      throw UsageError("--seed is required for '" + sub + "'");
    }
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << one_line(e.what()) << '\n';
    return kExitUsage;
  }

  const ExecOptions exec{flags.threads};
  try {
    const auto& s = cfg.subcommand;
    if (s == "gen") return cmd_gen(cfg, out);
    if (s == "norm") return cmd_norm(cfg, out);
    if (s == "net") return cmd_net(cfg, out);
    if (s == "tails") return cmd_tails(cfg, out, exec);
    if (s == "sweep") return cmd_sweep(cfg, out, exec);
    if (s == "decay") return cmd_decay(cfg, out, exec);
    if (s == "diag") return cmd_diag(cfg, out);
    return cmd_tw(cfg, out, exec);
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << one_line(e.what()) << '\n';
    return is_usage_kind(e.kind()) ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << '\n';
    return kExitRuntime;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace opnorm::cli
