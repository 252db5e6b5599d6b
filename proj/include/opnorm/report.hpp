#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "opnorm/experiments.hpp"

namespace opnorm {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

inline constexpr int kReportSchemaVersion = 1;

// Structured text report:
//
//   schema_version = 1
//   artifact_version = ...
//   master_seed = ...
//   timestamp = ...          (not part of the equality contract)
//
//   [config]
//   key = value
//
//   [payload]
//   kind = ...
//   key = value
//
// Reals are written with 17 significant digits; lists are space-separated.
struct ExperimentReport {
  int schema_version = kReportSchemaVersion;
  std::string artifact_version;
  std::uint64_t master_seed = 0;
  std::string timestamp;
  KeyValues config;
  KeyValues payload;

  // Equality ignores the timestamp.
  friend bool operator==(const ExperimentReport& a, const ExperimentReport& b) {
    return a.schema_version == b.schema_version && a.artifact_version == b.artifact_version &&
           a.master_seed == b.master_seed && a.config == b.config && a.payload == b.payload;
  }
};

std::string artifact_version();
std::string utc_timestamp();

void write_report(const ExperimentReport& report, const std::string& path);
std::string render_report(const ExperimentReport& report);
ExperimentReport read_report(const std::string& path);
ExperimentReport parse_report(const std::string& text);

// Value lookup; throws DataError when the key is missing.
const std::string& lookup(const KeyValues& kv, const std::string& key);

std::string join_reals(std::span<const double> v);
std::string join_sizes(std::span<const std::size_t> v);
std::vector<double> split_reals(const std::string& s);
std::vector<std::size_t> split_sizes(const std::string& s);

KeyValues payload_of(std::span<const TailEstimate> estimates, const std::string& kind = "tail_estimates");
KeyValues payload_of(const GrowthFit& fit);
KeyValues payload_of(const DecayCertificate& cert);

std::vector<TailEstimate> tail_estimates_from(const KeyValues& payload, const std::string& prefix = "");
GrowthFit growth_fit_from(const KeyValues& payload);
DecayCertificate decay_certificate_from(const KeyValues& payload);

// CSV with header n,mean_norm,p_hat,ci_low,ci_high,trials.
std::string render_sweep_csv(std::span<const SweepRow> rows);
void write_sweep_csv(std::span<const SweepRow> rows, const std::string& path);

}  // namespace opnorm
