#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskaudit/bootstrap.hpp"
#include "riskaudit/calibration.hpp"
#include "riskaudit/curve.hpp"
#include "riskaudit/dataset.hpp"
#include "riskaudit/ranking.hpp"
#include "riskaudit/synthetic.hpp"

namespace riskaudit {

inline constexpr const char* kToolVersion = "0.1.0";

/// Configuration or usage problem (CLI exit code 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input data failed validation (CLI exit code 2).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything an audit run needs. Defaults match the documented config
/// keys; load_audit_config applies a JSON file on top of the defaults and
/// rejects unknown keys.
struct AuditConfig {
  std::string input_path;
  char delimiter = ',';
  std::string score_column = "score";
  std::string outcome_column = "outcome";
  std::vector<std::string> sensitive_attributes;
  std::map<std::string, std::vector<std::string>> attribute_values;  // optional declarations
  std::size_t max_combination = 1;
  std::size_t min_group_size = 100;

  int n_bootstrap = 200;  // 0 disables resampling (point estimates only)
  double ci_level = 0.95;
  std::uint64_t seed = 0;
  double drop_threshold = 0.5;

  // enabled metrics: drmsce, ece-baselines, auroc, auprg, eur
  std::set<std::string> metrics = {"drmsce", "auroc", "auprg", "eur"};
  std::size_t min_per_bin = 10;
  double loess_span = 0.75;
  std::size_t loess_grid = 101;
  std::optional<ThresholdRange> threshold_range;

  bool curves = true;
  bool curve_bands = true;
  std::size_t score_hist_bins = 25;

  std::string output_dir = "audit_out";
  int jobs = 1;

  BootstrapPlan plan() const { return {n_bootstrap, ci_level, seed, drop_threshold}; }
};

AuditConfig load_audit_config(const std::string& path);
AuditConfig audit_config_from_json(const nlohmann::json& j);

/// Canonical re-serialization of the effective config (defaults filled in,
/// keys sorted); the report's digest is computed over this document.
nlohmann::json effective_config_json(const AuditConfig& config);
std::string config_digest(const AuditConfig& config);

/// One metric on one group.
struct MetricReport {
  std::string name;
  MetricEstimate estimate;
  std::optional<std::size_t> realized_bins;  // calibration metrics
  std::optional<std::size_t> skipped_draws;  // eur
  std::string missing_reason;                // set when the point estimate is missing
};

struct GroupReport {
  GroupDefinition definition;
  std::size_t size = 0;
  std::size_t positive_count = 0;
  double base_rate = 0.0;
  std::vector<MetricReport> metrics;
  std::vector<std::pair<std::string, CurveSeries>> curves;  // (kind, series)
};

struct AuditReport {
  std::vector<GroupReport> groups;
  nlohmann::json effective_config;
  std::string digest;
  std::string tool_version = kToolVersion;
};

/// Full pipeline: ingest and validate the input table, enumerate groups,
/// compute every enabled metric (with bootstrap uncertainty when enabled)
/// and the per-group curves. Group-level work may run on config.jobs
/// threads; the result does not depend on the worker count. Throws
/// ConfigError / DataError / std::runtime_error per the CLI exit contract.
AuditReport run_audit(const AuditConfig& config);

/// Same pipeline on an already validated dataset (benchmarks, tests).
AuditReport run_audit(const AuditConfig& config, const Dataset& dataset);

/// The hierarchical report document (the content of report.json).
nlohmann::json report_to_json(const AuditReport& report);

/// The flat per-group metric table (the content of metrics_by_group.csv).
std::string report_to_csv(const AuditReport& report);

/// Writes report.json, metrics_by_group.csv and one curve file per
/// (group, curve kind) under output_dir; returns the paths written
/// (relative to output_dir). Numbers in the flat tables carry 17
/// significant digits so re-parsing is exact.
std::vector<std::string> emit_report(const AuditReport& report, const std::string& output_dir);

/// Filesystem-safe directory slug for a group display name.
std::string group_slug(const std::string& display_name);

/// Serializes a curve file (columns x,y,lower,upper) and parses it back.
void write_curve_file(const CurveSeries& curve, const std::string& path);
CurveSeries read_curve_file(const std::string& path);

/// Runs the sample-size bias study and writes bias_study.csv (long format:
/// metric,scenario,sample_size,repetition,value) plus ground_truth.csv.
std::vector<std::string> run_bias_benchmark(const BiasStudyConfig& config,
                                            const std::string& output_dir);
BiasStudyConfig load_bias_config(const std::string& path);

/// Generates the two-group example, writes it as a CSV and audits it with
/// the given bootstrap settings; outputs land in output_dir.
std::vector<std::string> run_twogroup_benchmark(std::size_t n_per_group, std::uint64_t seed,
                                                int n_bootstrap, const std::string& output_dir,
                                                int jobs = 1);

}  // namespace riskaudit
