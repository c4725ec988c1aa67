#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "riskaudit/audit.hpp"
#include "riskaudit/svg.hpp"
#include "riskaudit/table.hpp"

using namespace riskaudit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("riskaudit_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// the worked 4-record ranking example with groups A and B
Dataset worked_dataset() {
  std::istringstream csv(
      "score,outcome,grp\n"
      "0.9,1,A\n"
      "0.6,0,A\n"
      "0.7,1,B\n"
      "0.2,0,B\n");
  auto table = read_table(csv);
  return validate_dataset(table, {{"grp", {"A", "B"}}}, "score", "outcome").dataset;
}

AuditConfig worked_config() {
  AuditConfig config;
  config.sensitive_attributes = {"grp"};
  config.min_group_size = 1;
  config.n_bootstrap = 0;
  config.metrics = {"eur", "auroc"};
  config.curves = false;
  return config;
}

const MetricReport& metric_of(const AuditReport& report, const std::string& group,
                              const std::string& metric) {
  for (const auto& g : report.groups) {
    if (g.definition.display_name != group) continue;
    for (const auto& m : g.metrics)
      if (m.name == metric) return m;
  }
  throw std::runtime_error("metric not found: " + group + "/" + metric);
}

}  // namespace

TEST_CASE("run_audit reproduces the worked ranking example") {
  auto report = run_audit(worked_config(), worked_dataset());
  REQUIRE(report.groups.size() == 3);  // overall, A, B
  CHECK(report.groups.front().definition.is_overall());

  CHECK(*metric_of(report, "grp=A", "eur").estimate.point_estimate == 1.0);
  CHECK(*metric_of(report, "grp=B", "eur").estimate.point_estimate == 2.0 / 3.0);
  CHECK(*metric_of(report, "overall", "eur").estimate.point_estimate == 1.0);
}

TEST_CASE("reports are byte-identical across runs and worker counts") {
  Dataset data = generate_two_group_example(800, 5);
  AuditConfig config;
  config.sensitive_attributes = {"group"};
  config.min_group_size = 1;
  config.n_bootstrap = 50;
  config.seed = 99;
  config.metrics = {"drmsce", "auroc", "eur"};
  config.curves = true;
  config.curve_bands = true;

  config.jobs = 1;
  auto first = run_audit(config, data);
  config.jobs = 4;
  auto second = run_audit(config, data);

  CHECK(report_to_json(first).dump(2) == report_to_json(second).dump(2));
  CHECK(report_to_csv(first) == report_to_csv(second));

  TempDir dir_a("det_a"), dir_b("det_b");
  emit_report(first, dir_a.path.string());
  emit_report(second, dir_b.path.string());
  CHECK(slurp(dir_a.path / "report.json") == slurp(dir_b.path / "report.json"));
  CHECK(slurp(dir_a.path / "metrics_by_group.csv") == slurp(dir_b.path / "metrics_by_group.csv"));
  CHECK(slurp(dir_a.path / "curves/group=blue/roc.csv") ==
        slurp(dir_b.path / "curves/group=blue/roc.csv"));
}

TEST_CASE("single-class groups carry missing metrics with reasons") {
  std::istringstream csv(
      "score,outcome,grp\n"
      "0.9,1,A\n"
      "0.6,1,A\n"
      "0.7,1,B\n"
      "0.2,0,B\n");
  Dataset data =
      validate_dataset(read_table(csv), {{"grp", {"A", "B"}}}, "score", "outcome").dataset;

  AuditConfig config = worked_config();
  config.metrics = {"auroc", "auprg"};
  auto report = run_audit(config, data);

  const auto& auroc_a = metric_of(report, "grp=A", "auroc");
  CHECK(!auroc_a.estimate.point_estimate.has_value());
  CHECK(auroc_a.missing_reason == "single_class");
  CHECK(metric_of(report, "grp=B", "auroc").estimate.point_estimate.has_value());
}

TEST_CASE("emit_report writes the documented file set") {
  Dataset data = generate_two_group_example(300, 17);
  AuditConfig config;
  config.sensitive_attributes = {"group"};
  config.min_group_size = 1;
  config.n_bootstrap = 20;
  config.metrics = {"drmsce", "auroc", "auprg", "eur"};

  auto report = run_audit(config, data);
  TempDir dir("emit");
  auto written = emit_report(report, dir.path.string());

  CHECK(fs::exists(dir.path / "report.json"));
  CHECK(fs::exists(dir.path / "metrics_by_group.csv"));
  // 3 groups x 5 curve kinds
  std::size_t curve_files = 0;
  for (const auto& rel : written)
    if (rel.rfind("curves/", 0) == 0) ++curve_files;
  CHECK(curve_files == 15);
  CHECK(fs::exists(dir.path / "curves/overall/reliability.csv"));
  CHECK(fs::exists(dir.path / "curves/group=orange/representation.csv"));
  CHECK(fs::exists(dir.path / "curves/group=blue/score_hist.csv"));

  SUBCASE("curve files round-trip exactly") {
    for (const char* kind : {"roc", "reliability", "representation", "score_hist"}) {
      auto path = dir.path / "curves/group=blue" / (std::string(kind) + ".csv");
      CurveSeries reread = read_curve_file(path.string());
      // find the in-memory curve
      const CurveSeries* original = nullptr;
      for (const auto& g : report.groups)
        if (g.definition.display_name == "group=blue")
          for (const auto& [k, c] : g.curves)
            if (k == kind) original = &c;
      REQUIRE(original != nullptr);
      REQUIRE(reread.size() == original->size());
      for (std::size_t i = 0; i < reread.size(); ++i) {
        CHECK(reread.x[i] == original->x[i]);
        if (!std::isnan(original->y[i])) CHECK(reread.y[i] == original->y[i]);
        if (original->has_bands() && !std::isnan(original->lower[i])) {
          CHECK(reread.lower[i] == original->lower[i]);
          CHECK(reread.upper[i] == original->upper[i]);
        }
      }
    }
  }

  SUBCASE("rendering a curve file produces an SVG") {
    auto svg_path = dir.path / "roc.svg";
    render_curve_file((dir.path / "curves/group=blue/roc.csv").string(), svg_path.string(),
                      "ROC group=blue");
    auto svg = slurp(svg_path);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("polyline") != std::string::npos);
  }

  SUBCASE("the report states estimates, never verdicts") {
    auto text = slurp(dir.path / "report.json");
    CHECK(text.find("unfair") == std::string::npos);
    CHECK(text.find("verdict") == std::string::npos);
  }
}

TEST_CASE("empty metric set yields a group inventory") {
  AuditConfig config = worked_config();
  config.metrics = {};
  config.curves = false;
  auto report = run_audit(config, worked_dataset());
  REQUIRE(report.groups.size() == 3);
  for (const auto& g : report.groups) {
    CHECK(g.metrics.empty());
    CHECK(g.size > 0);
  }
}

TEST_CASE("config digest matches the canonical re-serialization") {
  AuditConfig config = worked_config();
  CHECK(config_digest(config).size() == 16);
  CHECK(config_digest(config) == config_digest(config));

  // execution details do not perturb the digest
  AuditConfig other = config;
  other.jobs = 8;
  other.output_dir = "elsewhere";
  CHECK(config_digest(other) == config_digest(config));

  // analysis inputs do
  other.min_group_size = 7;
  CHECK(config_digest(other) != config_digest(config));

  auto report = run_audit(config, worked_dataset());
  CHECK(report.digest == config_digest(config));
  CHECK(report.effective_config == effective_config_json(config));
}

TEST_CASE("config parsing validates keys and values") {
  CHECK_THROWS_AS(audit_config_from_json(nlohmann::json{{"no_such_key", 1}}), ConfigError);
  CHECK_THROWS_AS(audit_config_from_json(nlohmann::json{{"metrics", {"bogus"}}}), ConfigError);
  CHECK_THROWS_AS(audit_config_from_json(nlohmann::json{{"min_group_size", 0}}), ConfigError);
  CHECK_THROWS_AS(
      audit_config_from_json(nlohmann::json{{"bootstrap", {{"ci_level", 1.5}}}}), ConfigError);
  CHECK_THROWS_AS(
      audit_config_from_json(nlohmann::json{{"threshold_range", {0.9, 0.1}}}), ConfigError);

  auto config = audit_config_from_json(nlohmann::json{
      {"metrics", {"drmsce", "eur"}}, {"bootstrap", {{"n_replicates", 25}, {"seed", 7}}}});
  CHECK(config.n_bootstrap == 25);
  CHECK(config.seed == 7);
  CHECK(config.metrics.count("eur") == 1);
}

TEST_CASE("csv ingestion end to end, including rejection") {
  TempDir dir("ingest");
  auto csv_path = dir.path / "data.csv";
  {
    std::ofstream out(csv_path);
    out << "risk;label;sex\n0.2;0;M\n0.8;1;F\n0.5;1;M\n0.1;0;F\n";
  }

  AuditConfig config;
  config.input_path = csv_path.string();
  config.delimiter = ';';
  config.score_column = "risk";
  config.outcome_column = "label";
  config.sensitive_attributes = {"sex"};
  config.min_group_size = 1;
  config.n_bootstrap = 0;
  config.metrics = {"auroc"};
  config.curves = false;

  auto report = run_audit(config);
  CHECK(report.groups.size() == 3);

  SUBCASE("a bad row fails the run with a data error") {
    {
      std::ofstream out(csv_path, std::ios::app);
      out << "1.7;0;M\n";
    }
    CHECK_THROWS_AS(run_audit(config), DataError);
  }
  SUBCASE("a missing column is a data error") {
    config.score_column = "absent";
    CHECK_THROWS_AS(run_audit(config), DataError);
  }
}

TEST_CASE("bias benchmark writes the study tables") {
  TempDir dir("bias");
  BiasStudyConfig config;
  config.sample_sizes = {100};
  config.n_repetitions = 4;
  config.seed = 10;
  auto written = run_bias_benchmark(config, dir.path.string());
  REQUIRE(written.size() == 2);

  auto study = slurp(dir.path / "bias_study.csv");
  // metrics x 2 scenarios x 1 size x 4 repetitions data rows + header
  std::size_t rows = std::count(study.begin(), study.end(), '\n');
  CHECK(rows == default_bias_metric_panel().size() * 2 * 4 + 1);

  auto truth = slurp(dir.path / "ground_truth.csv");
  CHECK(truth.find("square,") != std::string::npos);
  CHECK(truth.find(format_double(1.0 / 6.0)) != std::string::npos);
  CHECK(truth.find(format_double(std::sqrt(1.0 / 30.0))) != std::string::npos);

  SUBCASE("fixed seed reproduces the tables byte for byte") {
    TempDir dir2("bias2");
    run_bias_benchmark(config, dir2.path.string());
    CHECK(slurp(dir2.path / "bias_study.csv") == study);
  }
}

TEST_CASE("two-group benchmark produces data and report") {
  TempDir dir("twogroup");
  auto written = run_twogroup_benchmark(200, 3, 10, dir.path.string());
  CHECK(fs::exists(dir.path / "twogroup_data.csv"));
  CHECK(fs::exists(dir.path / "report.json"));
  auto report_text = slurp(dir.path / "report.json");
  CHECK(report_text.find("group=blue") != std::string::npos);
  CHECK(report_text.find("group=orange") != std::string::npos);
}
