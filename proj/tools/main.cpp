#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riskaudit/audit.hpp"
#include "riskaudit/svg.hpp"

namespace {

// exit codes: 0 ok, 1 usage/config error, 2 data validation error, 3 runtime failure
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> items;
  std::string item;
  for (char c : csv) {
    if (c == ',') {
      if (!item.empty()) items.push_back(item);
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  if (!item.empty()) items.push_back(item);
  return items;
}

struct AuditFlags {
  std::string input, config_path, out, metrics, attributes, delimiter;
  std::string score_column, outcome_column;
  std::optional<std::uint64_t> seed;
  std::optional<int> bootstrap;
  std::optional<double> ci_level;
  std::optional<std::size_t> min_group_size, max_combination;
  std::optional<int> jobs;
  bool no_curves = false;
  bool no_curve_bands = false;
};

riskaudit::AuditConfig resolve_audit_config(const AuditFlags& flags) {
  riskaudit::AuditConfig config;
  if (!flags.config_path.empty()) config = riskaudit::load_audit_config(flags.config_path);

  // flags override file keys
  if (!flags.input.empty()) config.input_path = flags.input;
  if (!flags.out.empty()) config.output_dir = flags.out;
  if (!flags.score_column.empty()) config.score_column = flags.score_column;
  if (!flags.outcome_column.empty()) config.outcome_column = flags.outcome_column;
  if (!flags.attributes.empty()) config.sensitive_attributes = split_list(flags.attributes);
  if (!flags.metrics.empty()) {
    auto list = split_list(flags.metrics);
    config.metrics = std::set<std::string>(list.begin(), list.end());
  }
  if (!flags.delimiter.empty()) {
    if (flags.delimiter == "tab" || flags.delimiter == "\\t")
      config.delimiter = '\t';
    else if (flags.delimiter.size() == 1)
      config.delimiter = flags.delimiter[0];
    else
      throw riskaudit::ConfigError("--delimiter must be a single character or 'tab'");
  }
  if (flags.seed) config.seed = *flags.seed;
  if (flags.bootstrap) config.n_bootstrap = *flags.bootstrap;
  if (flags.ci_level) config.ci_level = *flags.ci_level;
  if (flags.min_group_size) config.min_group_size = *flags.min_group_size;
  if (flags.max_combination) config.max_combination = *flags.max_combination;
  if (flags.jobs) config.jobs = *flags.jobs;
  if (flags.no_curves) config.curves = false;
  if (flags.no_curve_bands) config.curve_bands = false;

  if (config.input_path.empty())
    throw riskaudit::ConfigError("no input file (use --input or the config's \"input\" key)");
  if (config.sensitive_attributes.empty())
    throw riskaudit::ConfigError(
        "no sensitive attributes (use --attributes or the config's \"sensitive_attributes\" key)");
  // flag values go through the same validation as file keys
  riskaudit::audit_config_from_json(riskaudit::effective_config_json(config));
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"riskaudit - per-group risk score evaluation with calibration, "
               "discrimination and ranking-fairness metrics"};
  app.require_subcommand(1);

  // ---- audit
  AuditFlags flags;
  auto* audit = app.add_subcommand("audit", "Audit a scored dataset per group");
  audit->add_option("--input", flags.input, "Input CSV with score/outcome/attribute columns");
  audit->add_option("--config", flags.config_path, "JSON config file");
  audit->add_option("--out", flags.out, "Output directory");
  audit->add_option("--seed", flags.seed, "Bootstrap base seed");
  audit->add_option("--bootstrap", flags.bootstrap, "Bootstrap replicates (0 disables)");
  audit->add_option("--ci-level", flags.ci_level, "Confidence level, e.g. 0.95");
  audit->add_option("--min-group-size", flags.min_group_size, "Smallest group to audit");
  audit->add_option("--max-combo", flags.max_combination,
                    "Max sensitive attributes combined per group");
  audit->add_option("--metrics", flags.metrics,
                    "Comma list: drmsce,ece-baselines,auroc,auprg,eur");
  audit->add_option("--attributes", flags.attributes, "Comma list of sensitive attribute columns");
  audit->add_option("--score-column", flags.score_column, "Score column name");
  audit->add_option("--outcome-column", flags.outcome_column, "Outcome column name");
  audit->add_option("--delimiter", flags.delimiter, "Cell delimiter (single char or 'tab')");
  audit->add_option("--jobs", flags.jobs, "Worker threads for group-level work");
  audit->add_flag("--no-curves", flags.no_curves, "Skip curve files");
  audit->add_flag("--no-curve-bands", flags.no_curve_bands, "Skip bootstrap bands on curves");

  // ---- bench-bias
  std::string bias_config_path, bias_out = "bias_out";
  std::optional<std::uint64_t> bias_seed;
  std::optional<int> bias_reps;
  std::string bias_sizes;
  auto* bias = app.add_subcommand("bench-bias", "Sample-size bias study on synthetic streams");
  bias->add_option("--config", bias_config_path, "JSON study config");
  bias->add_option("--out", bias_out, "Output directory");
  bias->add_option("--seed", bias_seed, "Study seed");
  bias->add_option("--repetitions", bias_reps, "Repetitions per cell");
  bias->add_option("--sizes", bias_sizes, "Comma list of sample sizes");

  // ---- bench-twogroup
  std::size_t tg_n = 20000;
  std::uint64_t tg_seed = 0;
  int tg_bootstrap = 200, tg_jobs = 1;
  std::string tg_out = "twogroup_out";
  auto* twogroup =
      app.add_subcommand("bench-twogroup", "Two-group calibrated-but-ranking-unfair example");
  twogroup->add_option("--n-per-group", tg_n, "Samples per group");
  twogroup->add_option("--seed", tg_seed, "Generator / bootstrap seed");
  twogroup->add_option("--bootstrap", tg_bootstrap, "Bootstrap replicates (0 disables)");
  twogroup->add_option("--out", tg_out, "Output directory");
  twogroup->add_option("--jobs", tg_jobs, "Worker threads");

  // ---- render
  std::string render_in, render_out, render_title = "curve";
  auto* render = app.add_subcommand("render", "Render a curve file to SVG");
  render->add_option("--input", render_in, "Curve CSV (x,y,lower,upper)")->required();
  render->add_option("--out", render_out, "SVG output path")->required();
  render->add_option("--title", render_title, "Plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*audit) {
      riskaudit::AuditConfig config = resolve_audit_config(flags);
      riskaudit::AuditReport report = riskaudit::run_audit(config);
      riskaudit::emit_report(report, config.output_dir);
      std::cout << "audited " << report.groups.size() << " group(s) -> " << config.output_dir
                << "\n";
    } else if (*bias) {
      riskaudit::BiasStudyConfig config;
      if (!bias_config_path.empty()) config = riskaudit::load_bias_config(bias_config_path);
      if (bias_seed) config.seed = *bias_seed;
      if (bias_reps) config.n_repetitions = *bias_reps;
      if (!bias_sizes.empty()) {
        config.sample_sizes.clear();
        for (const auto& s : split_list(bias_sizes)) config.sample_sizes.push_back(std::stoul(s));
      }
      riskaudit::run_bias_benchmark(config, bias_out);
      std::cout << "bias study -> " << bias_out << "\n";
    } else if (*twogroup) {
      riskaudit::run_twogroup_benchmark(tg_n, tg_seed, tg_bootstrap, tg_out, tg_jobs);
      std::cout << "two-group benchmark -> " << tg_out << "\n";
    } else if (*render) {
      riskaudit::render_curve_file(render_in, render_out, render_title);
      std::cout << "rendered " << render_out << "\n";
    }
  } catch (const riskaudit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const riskaudit::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
