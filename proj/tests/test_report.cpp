#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "opnorm/errors.hpp"
#include "opnorm/report.hpp"

using namespace opnorm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

ExperimentReport sample_report() {
  std::vector<TailEstimate> est{make_tail_estimate(0.5, 16, 40, 40), make_tail_estimate(2.0, 16, 3, 40),
                                make_tail_estimate(4.0, 16, 0, 40)};
  ExperimentReport r;
  r.artifact_version = artifact_version();
  r.master_seed = 17;
  r.timestamp = utc_timestamp();
  r.config = {{"subcommand", "tails"}, {"n", "16"}, {"A_grid", "0.5 2 4"}};
  r.payload = payload_of(est);
  return r;
}

}  // namespace

TEST_CASE("report round trip") {
  const ExperimentReport r = sample_report();
  const ExperimentReport back = parse_report(render_report(r));
  CHECK(back == r);
  CHECK(back.timestamp == r.timestamp);

  const auto est = tail_estimates_from(back.payload);
  REQUIRE(est.size() == 3);
  CHECK(est[1] == make_tail_estimate(2.0, 16, 3, 40));
  CHECK(est[2].ci_high == doctest::Approx(3.0 / 40.0));
}

TEST_CASE("growth and decay payloads round trip") {
  GrowthFit g{{8, 16, 32}, {8.0, 16.0, 32.0}, 1.0, 0.0, 1e-16};
  CHECK(growth_fit_from(payload_of(g)) == g);

  std::vector<SweepRow> rows;
  for (auto [n, hits] : {std::pair{8u, 40u}, std::pair{16u, 2u}, std::pair{32u, 0u}})
    rows.push_back({n, 2.0 * std::sqrt(double(n)), make_tail_estimate(2.5, n, hits, 1000)});
  const DecayCertificate cert = decay_certificate_of(2.5, rows);
  const DecayCertificate back = decay_certificate_from(payload_of(cert));
  CHECK(back == cert);
  CHECK(std::isinf(back.neg_log_p.back()));
}

TEST_CASE("identical reports render identically apart from the timestamp") {
  ExperimentReport a = sample_report();
  ExperimentReport b = sample_report();
  b.timestamp = "1999-01-01T00:00:00Z";
  CHECK(a == b);
  a.timestamp = b.timestamp;
  CHECK(render_report(a) == render_report(b));
}

TEST_CASE("report file I/O") {
  const fs::path dir = fs::temp_directory_path() / "opnorm_report_test";
  fs::create_directories(dir);
  const std::string path = (dir / "r.txt").string();
  const ExperimentReport r = sample_report();
  write_report(r, path);
  CHECK(read_report(path) == r);
  fs::remove_all(dir);

  const std::string missing = "/nonexistent_dir_opnorm/r.txt";
  try {
    write_report(r, missing);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find(missing) != std::string::npos);
  }
  CHECK_THROWS_AS(read_report(missing), IoError);
}

TEST_CASE("malformed reports") {
  CHECK_THROWS_AS(parse_report("schema_version = 1\n[bogus]\n"), DataError);
  CHECK_THROWS_AS(parse_report("schema_version = 1\nno equals sign\n"), DataError);
  CHECK_THROWS_AS(lookup(KeyValues{{"a", "1"}}, "b"), DataError);
}

TEST_CASE("list helpers and CSV") {
  const std::vector<double> v{0.5, 1e-300, 3.0};
  CHECK(split_reals(join_reals(v)) == v);
  CHECK(std::isinf(split_reals("1 inf")[1]));
  const std::vector<std::size_t> s{1, 20, 300};
  CHECK(split_sizes(join_sizes(s)) == s);
  CHECK_THROWS_AS(split_sizes("1 -2"), DataError);

  const std::vector<SweepRow> rows{{8, 8.0, make_tail_estimate(1.0, 8, 10, 10)}};
  const std::string csv = render_sweep_csv(rows);
  CHECK(csv.rfind("n,mean_norm,p_hat,ci_low,ci_high,trials\n", 0) == 0);
  CHECK(csv.find("\n8,8,1,") != std::string::npos);
  CHECK_THROWS_AS(write_sweep_csv(rows, "/nonexistent_dir_opnorm/x.csv"), IoError);
}
