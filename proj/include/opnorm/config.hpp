#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opnorm/ensembles.hpp"
#include "opnorm/experiments.hpp"
#include "opnorm/report.hpp"
#include "opnorm/specnorm.hpp"

namespace opnorm {

// Effective settings for one CLI run. Every key has a default; set() rejects
// unknown keys and out-of-range values. Key names double as config-file keys
// and (with '_' spelled '-') as command-line flags.
struct RunConfig {
  std::string subcommand;

  // Ensemble section.
  std::string ensemble = "iid";  // iid | rows | ones
  std::string dist = "gaussian";  // gaussian | rademacher | uniform | trunc_gaussian | student_t
  double sigma = 1.0;
  double half_width = 1.0;
  double cap = 3.0;
  double dof = 3.0;
  double load = 0.5;
  std::string mixer = "identity";  // identity | rotation | common_factor
  std::uint64_t mixer_seed = 0;

  // Numeric parameters.
  std::size_t n = 64;
  std::vector<std::size_t> n_grid = {64, 128, 256, 512};
  double A = 2.5;
  std::vector<double> A_grid = kDefaultAGrid;
  double eps = 0.5;
  std::size_t trials = 100;
  double rtol = 1e-10;
  int max_iter = 10'000;
  std::uint64_t saturation_T = 10'000;
  std::size_t dim = 3;
  std::uint64_t probes = 100'000;
  double width_c = 3.0;
  std::string u_mode = "first_basis";  // first_basis | uniform_diagonal | seeded_random
  int p_max = 20;
  std::size_t samples = 1'000'000;
  double psi2_b = 0.25;
  std::string norm_kind = "spectral";  // spectral | one | inf | all
  std::string method = "auto";         // auto | exact | power

  std::optional<std::uint64_t> master_seed;
  std::string output;
  std::string csv;
  std::string input;

  // Parses and validates one value; throws ConfigError naming the key.
  void set(const std::string& key, const std::string& value);

  // Cross-field checks for the chosen subcommand.
  void validate() const;

  EnsembleSpec ensemble_spec() const;
  UMode u_mode_value() const;

  // Every key in fixed order, as echoed into reports.
  KeyValues echo() const;
};

const std::vector<std::string>& config_keys();

// Reads key = value lines ('#' comments). When the file has section headers
// (a report), only the [config] section is read.
// Errors: ConfigError with the line number, unknown key name, or field bound.
RunConfig load_config(const std::string& path, RunConfig base = {});
RunConfig parse_config(const std::string& text, RunConfig base = {},
                       const std::string& origin = "<config>");

}  // namespace opnorm
