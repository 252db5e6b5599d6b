// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "opnorm/diagnostics.hpp"
#include "opnorm/ensembles.hpp"
#include "opnorm/epsnet.hpp"
#include "opnorm/experiments.hpp"
#include "opnorm/report.hpp"
#include "opnorm/specnorm.hpp"
#include "opnorm/stats.hpp"

using namespace opnorm;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string name;
  double time_limit_s;  // 0: no runtime bound
  std::function<Outcome()> body;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const std::vector<std::size_t> kGrowthGrid{64, 128, 256, 512};
constexpr std::size_t kGrowthTrials = 30;

Outcome growth_window(const EnsembleSpec& spec, std::uint64_t seed) {
  const GrowthFit fit = growth_sweep(spec, kGrowthGrid, kGrowthTrials, seed);
  return {fit.slope >= 0.45 && fit.slope <= 0.55, "slope=" + fmt(fit.slope) + " window [0.45, 0.55]"};
}

Outcome all_ones_exactness() {
  double worst = 0.0;
  for (std::size_t n = 1; n <= 64; ++n) {
    const Matrix m = Matrix::ones(n, n);
    const double target = static_cast<double>(n);
    for (double v : {opnorm_exact(m), opnorm_power(m, 1e-10, 10'000).value,
                     opnorm_closed(m, NormKind::One), opnorm_closed(m, NormKind::Inf)})
      worst = std::max(worst, std::abs(v - target));
  }
  return {worst <= 1e-9, "max |norm - n| = " + fmt(worst) + " (tol 1e-9)"};
}

Outcome oracle_equivalence() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Matrix m = sample_matrix(IidEntries{Gaussian{1.0}}, 30, 30, derive_trial_seed(2, s));
    const double exact = opnorm_exact(m);
    const double pw = opnorm_power(m, 1e-12, 100'000).value;
    worst = std::max(worst, std::abs(pw - exact) / exact);
  }
  return {worst <= 1e-8, "max relative gap = " + fmt(worst) + " (tol 1e-8)"};
}

Outcome edge_location() {
  const std::size_t n = 200;
  const auto norms = trial_norms(IidEntries{Gaussian{1.0}}, n, 100, 3);
  const double ratio = mean(norms) / std::sqrt(static_cast<double>(n));
  return {ratio >= 1.85 && ratio <= 2.15, "mean sigma_max/sqrt(n) = " + fmt(ratio) + " window [1.85, 2.15]"};
}

Outcome all_ones_growth() {
  const GrowthFit fit = growth_sweep(AllOnes{}, kGrowthGrid, kGrowthTrials, 6);
  return {std::abs(fit.slope - 1.0) <= 1e-6, "slope=" + fmt(fit.slope) + " (1 +- 1e-6)"};
}

Outcome overwhelming_decay() {
  const std::vector<std::size_t> grid{8, 16, 32, 64};
  const DecayCertificate c = overwhelming_decay_check(IidEntries{Gaussian{1.0}}, 2.5, grid, 10'000, 7);
  std::ostringstream hits;
  for (const auto& e : c.estimates) hits << (hits.tellp() ? "," : "") << e.hits;
  return {c.monotone && c.c_hat > 0.0 && !c.degenerate,
          std::string("monotone=") + (c.monotone ? "true" : "false") + " c_hat=" + fmt(c.c_hat) +
              " degenerate=" + (c.degenerate ? "true" : "false") + " hits=" + hits.str()};
}

Outcome net_sandwich() {
  EpsNet net = build_net(5, 0.25, 8, 100'000);
  const double coverage = audit_coverage_check(net, 100'000, 80);
  bool lower_ok = true, upper_ok = true;
  double worst_upper = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Matrix m = sample_matrix(IidEntries{Gaussian{1.0}}, 5, 5, derive_trial_seed(8, s));
    const double exact = opnorm_exact(m);
    lower_ok = lower_ok && net_lower_bound(m, net) <= exact * (1.0 + 1e-12);
    const double ub = net_upper_bound(m, net);
    upper_ok = upper_ok && exact <= 1.05 * ub;
    worst_upper = std::max(worst_upper, exact / ub);
  }
  return {coverage >= 0.999 && lower_ok && upper_ok,
          "|net|=" + std::to_string(net.size()) + " coverage=" + fmt(coverage) +
              " lower<=exact:" + (lower_ok ? "yes" : "no") + " max exact/upper=" + fmt(worst_upper)};
}

Outcome net_cardinality() {
  bool ok = true;
  std::ostringstream detail;
  for (std::size_t dim : {2u, 3u, 4u})
    for (double eps : {0.3, 0.5, 1.0}) {
      const EpsNet net = build_net(dim, eps, 9, 10'000);
      ok = ok && static_cast<double>(net.size()) <= cardinality_bounds(dim, eps).packing_ratio;
    }
  const EpsNet circle = build_net(2, 0.5, 9, 10'000);
  const bool circle_ok = circle.size() >= 7 && circle.size() <= 12;
  detail << "all <= packing ratio:" << (ok ? "yes" : "no") << " circle |net|=" << circle.size()
         << " in [7, 12] (ratio " << fmt(cardinality_bounds(2, 0.5).packing_ratio) << ")";
  return {ok && circle_ok, detail.str()};
}

Outcome diagnostics_battery() {
  constexpr std::size_t N = 1'000'000;
  const auto g = draw_samples(Gaussian{1.0}, N, 10);
  const TailFit gfit = fit_tail_params(g);
  const bool gauss = subgaussian_verdict(gfit).accept && gfit.b_hat >= 0.35 && gfit.b_hat <= 0.65;
  const bool rad = diagnose_samples(draw_samples(Rademacher{}, N, 10)).accept;
  const bool uni = diagnose_samples(draw_samples(UniformSym{1.0}, N, 10)).accept;
  const bool trunc = diagnose_samples(draw_samples(TruncGaussian{1.0, 3.0}, N, 10)).accept;
  const auto t = draw_samples(StudentT{3.0}, N, 10);
  const bool student = !diagnose_samples(t).accept;
  const double psi2 = psi2_estimate(g, 0.25).value;
  const bool psi2_ok = psi2 >= 1.40 && psi2 <= 1.43;
  const std::span<const double> t_small(t.data(), 10'000);
  const double k_ratio = moment_ratio_profile(t, 20).K_hat / moment_ratio_profile(t_small, 20).K_hat;
  std::ostringstream d;
  d << "gaussian b_hat=" << fmt(gfit.b_hat) << (gauss ? " ok" : " FAIL") << "; rademacher "
    << (rad ? "ok" : "FAIL") << "; uniform " << (uni ? "ok" : "FAIL") << "; trunc " << (trunc ? "ok" : "FAIL")
    << "; student_t rejected " << (student ? "ok" : "FAIL") << "; psi2=" << fmt(psi2)
    << "; K_hat growth x" << fmt(k_ratio);
  return {gauss && rad && uni && trunc && student && psi2_ok && k_ratio >= 2.0, d.str()};
}

Outcome determinism() {
  const std::vector<std::size_t> grid{16, 64, 130, 160};
  const std::vector<EnsembleSpec> specs{IidEntries{Gaussian{1.0}}, IndependentRows{Rademacher{}, FixedRotation{1}},
                                        IndependentRows{Gaussian{1.0}, CommonFactor{0.5}}};
  bool same = true;
  for (const auto& spec : specs) {
    const auto a = render_sweep_csv(sweep_rows(spec, grid, 2.0, 16, 11, ExecOptions{1}));
    const auto b = render_sweep_csv(sweep_rows(spec, grid, 2.0, 16, 11, ExecOptions{8}));
    same = same && a == b;
  }
  return {same, same ? "CSV byte-identical at 1 and 8 threads" : "CSV differs between thread counts"};
}

Outcome event_inclusion() {
  const EnsembleSpec spec = IidEntries{Gaussian{1.0}};
  const std::size_t n = 32, trials = 2000;
  const auto op = tail_curve(spec, n, kDefaultAGrid, trials, 12);
  bool ok = true;
  for (UMode mode : {UMode::FirstBasis, UMode::UniformDiagonal, UMode::SeededRandom}) {
    const auto fx = fixed_vector_curve(spec, n, mode, kDefaultAGrid, trials, 12);
    for (std::size_t i = 0; i < op.size(); ++i) ok = ok && fx[i].p_hat <= op[i].p_hat;
  }
  return {ok, "fixed-vector p_hat <= operator p_hat at all " + std::to_string(op.size()) + " A values, 3 u modes"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"1", "all-ones exactness", 5, all_ones_exactness},
      {"2", "power vs exact oracle", 10, oracle_equivalence},
      {"3", "edge location", 120, edge_location},
      {"4", "growth, iid Rademacher", 300,
       [] { return growth_window(IidEntries{Rademacher{}}, 4); }},
      {"5a", "growth, rows with common factor 0.5", 300,
       [] { return growth_window(IndependentRows{Gaussian{1.0}, CommonFactor{0.5}}, 5); }},
      {"5b", "growth, rows with fixed rotation", 300,
       [] { return growth_window(IndependentRows{Rademacher{}, FixedRotation{5}}, 5); }},
      {"6", "all-ones growth", 0, all_ones_growth},
      {"7", "overwhelming decay", 0, overwhelming_decay},
      {"8", "net sandwich", 120, net_sandwich},
      {"9", "net cardinality", 60, net_cardinality},
      {"10", "diagnostics battery", 60, diagnostics_battery},
      {"11", "thread-count determinism", 0, determinism},
      {"12", "event inclusion", 0, event_inclusion},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt(secs) + " s";
    if (c.time_limit_s > 0) {
      timing += " / limit " + fmt(c.time_limit_s) + " s";
      if (secs > c.time_limit_s) {
        o.pass = false;
        o.detail += "; over time limit";
      }
    }
    failed += !o.pass;
    std::printf("%s criterion %-3s %-38s %s [%s]\n", o.pass ? "PASS" : "FAIL", c.id.c_str(), c.name.c_str(),
                o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
