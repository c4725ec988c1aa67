#include "riskaudit/audit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <cctype>
#include <sstream>
#include <thread>

#include "riskaudit/discrimination.hpp"
#include "riskaudit/rng.hpp"
#include "riskaudit/table.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace riskaudit {

namespace {

constexpr std::size_t kRepresentationGridCap = 512;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Deterministic work distribution: results land in slot i regardless of
// which worker computed them.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  const int n_workers = static_cast<int>(std::min<std::size_t>(jobs, count));
  workers.reserve(n_workers);
  for (int t = 0; t < n_workers; ++t) {
    workers.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

char parse_delimiter(const std::string& text) {
  if (text == "tab" || text == "\\t") return '\t';
  if (text.size() == 1) return text[0];
  throw ConfigError("delimiter must be a single character or \"tab\": '" + text + "'");
}

const std::set<std::string> kKnownMetrics = {"drmsce", "ece-baselines", "auroc", "auprg", "eur"};

}  // namespace

AuditConfig audit_config_from_json(const json& j) {
  static const std::set<std::string> known_keys = {
      "input",        "delimiter",      "score_column",    "outcome_column",
      "sensitive_attributes", "attribute_values", "max_combination", "min_group_size",
      "bootstrap",    "metrics",        "calibration",     "loess",
      "threshold_range", "curves",      "curve_bands",     "score_hist_bins",
      "output_dir",   "jobs"};
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known_keys.count(key)) throw ConfigError("unknown config key: " + key);

  AuditConfig c;
  try {
    if (j.contains("input")) c.input_path = j.at("input").get<std::string>();
    if (j.contains("delimiter")) c.delimiter = parse_delimiter(j.at("delimiter").get<std::string>());
    if (j.contains("score_column")) c.score_column = j.at("score_column").get<std::string>();
    if (j.contains("outcome_column"))
      c.outcome_column = j.at("outcome_column").get<std::string>();
    if (j.contains("sensitive_attributes"))
      c.sensitive_attributes = j.at("sensitive_attributes").get<std::vector<std::string>>();
    if (j.contains("attribute_values"))
      c.attribute_values =
          j.at("attribute_values").get<std::map<std::string, std::vector<std::string>>>();
    if (j.contains("max_combination")) c.max_combination = j.at("max_combination").get<std::size_t>();
    if (j.contains("min_group_size")) c.min_group_size = j.at("min_group_size").get<std::size_t>();

    if (j.contains("bootstrap")) {
      const auto& b = j.at("bootstrap");
      if (b.contains("n_replicates")) c.n_bootstrap = b.at("n_replicates").get<int>();
      if (b.contains("ci_level")) c.ci_level = b.at("ci_level").get<double>();
      if (b.contains("seed")) c.seed = b.at("seed").get<std::uint64_t>();
      if (b.contains("drop_threshold")) c.drop_threshold = b.at("drop_threshold").get<double>();
    }
    if (j.contains("metrics"))
      c.metrics = std::set<std::string>(j.at("metrics").begin(), j.at("metrics").end());
    if (j.contains("calibration")) {
      const auto& cal = j.at("calibration");
      if (cal.contains("min_per_bin")) c.min_per_bin = cal.at("min_per_bin").get<std::size_t>();
    }
    if (j.contains("loess")) {
      const auto& l = j.at("loess");
      if (l.contains("span")) c.loess_span = l.at("span").get<double>();
      if (l.contains("grid_size")) c.loess_grid = l.at("grid_size").get<std::size_t>();
    }
    if (j.contains("threshold_range") && !j.at("threshold_range").is_null()) {
      auto r = j.at("threshold_range").get<std::vector<double>>();
      if (r.size() != 2 || !(r[0] <= r[1]))
        throw ConfigError("threshold_range must be [min, max] with min <= max");
      c.threshold_range = ThresholdRange{r[0], r[1]};
    }
    if (j.contains("curves")) c.curves = j.at("curves").get<bool>();
    if (j.contains("curve_bands")) c.curve_bands = j.at("curve_bands").get<bool>();
    if (j.contains("score_hist_bins"))
      c.score_hist_bins = j.at("score_hist_bins").get<std::size_t>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  for (const auto& m : c.metrics)
    if (!kKnownMetrics.count(m)) throw ConfigError("unknown metric: " + m);
  if (c.min_group_size < 1) throw ConfigError("min_group_size must be >= 1");
  if (c.max_combination < 1) throw ConfigError("max_combination must be >= 1");
  if (c.n_bootstrap < 0) throw ConfigError("bootstrap.n_replicates must be >= 0");
  if (!(c.ci_level > 0.0 && c.ci_level < 1.0)) throw ConfigError("ci_level must be in (0,1)");
  if (c.min_per_bin < 2) throw ConfigError("calibration.min_per_bin must be >= 2");
  if (!(c.loess_span > 0.0 && c.loess_span <= 1.0)) throw ConfigError("loess.span must be in (0,1]");
  if (c.loess_grid < 2) throw ConfigError("loess.grid_size must be >= 2");
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  return c;
}

AuditConfig load_audit_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return audit_config_from_json(j);
}

json effective_config_json(const AuditConfig& c) {
  // jobs and output_dir are execution details, not analysis inputs; they
  // stay out of the canonical form so reports are byte-identical across
  // worker counts and output locations.
  json j;
  j["input"] = c.input_path;
  j["delimiter"] = std::string(1, c.delimiter);
  j["score_column"] = c.score_column;
  j["outcome_column"] = c.outcome_column;
  j["sensitive_attributes"] = c.sensitive_attributes;
  j["attribute_values"] = c.attribute_values;
  j["max_combination"] = c.max_combination;
  j["min_group_size"] = c.min_group_size;
  j["bootstrap"] = {{"n_replicates", c.n_bootstrap},
                    {"ci_level", c.ci_level},
                    {"seed", c.seed},
                    {"drop_threshold", c.drop_threshold}};
  j["metrics"] = std::vector<std::string>(c.metrics.begin(), c.metrics.end());
  j["calibration"] = {{"min_per_bin", c.min_per_bin}};
  j["loess"] = {{"span", c.loess_span}, {"grid_size", c.loess_grid}};
  if (c.threshold_range)
    j["threshold_range"] = {c.threshold_range->min, c.threshold_range->max};
  else
    j["threshold_range"] = nullptr;
  j["curves"] = c.curves;
  j["curve_bands"] = c.curve_bands;
  j["score_hist_bins"] = c.score_hist_bins;
  return j;
}

std::string config_digest(const AuditConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(effective_config_json(config).dump())));
  return buf;
}

namespace {

// ---------------------------------------------------------------------
// curve helpers

// Linear interpolation of an x-sorted curve onto a grid; NaN outside the
// curve's x-extent.
std::vector<double> interp_on_grid(const CurveSeries& curve, std::span<const double> grid) {
  std::vector<double> out(grid.size(), kNaN);
  if (curve.size() == 0) return out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double x = grid[g];
    if (x < curve.x.front() || x > curve.x.back()) continue;
    auto it = std::lower_bound(curve.x.begin(), curve.x.end(), x);
    std::size_t i = it - curve.x.begin();
    if (i < curve.x.size() && curve.x[i] == x) {
      out[g] = curve.y[i];
      continue;
    }
    double x0 = curve.x[i - 1], x1 = curve.x[i];
    double t = (x - x0) / (x1 - x0);
    out[g] = curve.y[i - 1] + t * (curve.y[i] - curve.y[i - 1]);
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = lo + (hi - lo) * double(i) / double(count - 1);
  return grid;
}

// Representation ratio of the block's group at each grid threshold; NaN
// where nobody is selected or the group has no positives in the block.
std::vector<double> representation_on_grid(const SampleBlock& block,
                                           std::span<const double> grid) {
  std::vector<double> out(grid.size(), kNaN);
  auto target = target_representation(block.outcomes(), block.in_group());
  if (!target || *target == 0.0) return out;

  // grid ascending, block ascending: walk both from the top.
  auto scores = block.scores();
  auto mask = block.in_group();
  const std::size_t n = scores.size();
  std::size_t i = n;  // samples with index >= i are selected
  std::size_t selected_group = 0;
  for (std::size_t g = grid.size(); g-- > 0;) {
    double tau = grid[g];
    while (i > 0 && scores[i - 1] >= tau) {
      --i;
      selected_group += mask[i];
    }
    std::size_t selected = n - i;
    if (selected > 0) out[g] = double(selected_group) / double(selected) / *target;
  }
  return out;
}

std::vector<double> roc_on_grid(const SampleBlock& block, std::span<const double> grid) {
  auto curve = roc_curve(block.scores(), block.outcomes());
  if (!curve) return std::vector<double>(grid.size(), kNaN);
  return interp_on_grid(*curve, grid);
}

std::vector<double> prg_on_grid(const SampleBlock& block, std::span<const double> grid) {
  auto curve = prg_curve(block.scores(), block.outcomes());
  if (!curve) return std::vector<double>(grid.size(), kNaN);
  return interp_on_grid(*curve, grid);
}

CurveSeries score_histogram(std::span<const double> scores, std::size_t n_bins) {
  CurveSeries hist;
  hist.x_label = "risk score";
  hist.y_label = "fraction of group";
  std::vector<std::size_t> counts(n_bins, 0);
  for (double s : scores) {
    auto b = std::min<std::size_t>(n_bins - 1, static_cast<std::size_t>(s * double(n_bins)));
    ++counts[b];
  }
  for (std::size_t b = 0; b < n_bins; ++b) {
    hist.x.push_back((double(b) + 0.5) / double(n_bins));
    hist.y.push_back(double(counts[b]) / double(scores.size()));
  }
  return hist;
}

// Distinct thresholds of the full score column (ascending), thinned
// deterministically when there are more than `cap`.
std::vector<double> threshold_grid(std::span<const double> sorted_scores,
                                   std::optional<ThresholdRange> range, std::size_t cap) {
  std::vector<double> distinct;
  for (std::size_t i = 0; i < sorted_scores.size(); ++i) {
    if (i > 0 && sorted_scores[i] == sorted_scores[i - 1]) continue;
    if (range && !range->contains(sorted_scores[i])) continue;
    distinct.push_back(sorted_scores[i]);
  }
  if (distinct.size() <= cap) return distinct;
  std::vector<double> thinned;
  thinned.reserve(cap);
  for (std::size_t k = 0; k < cap; ++k)
    thinned.push_back(distinct[k * (distinct.size() - 1) / (cap - 1)]);
  thinned.erase(std::unique(thinned.begin(), thinned.end()), thinned.end());
  return thinned;
}

// ---------------------------------------------------------------------
// per-group computation

struct MetricSpec {
  std::string name;
  bool needs_group_context;  // full-sample block with membership mask
  ScalarMetricFn fn;
  std::optional<CalibrationEstimatorConfig> calibration;  // realized-bins reporting
};

std::vector<MetricSpec> build_metric_specs(const AuditConfig& config) {
  std::vector<MetricSpec> specs;
  const std::size_t min_per_bin = config.min_per_bin;
  auto add_calibration = [&](CalibrationEstimatorConfig cal) {
    specs.push_back({cal.label, false,
                     [cal](const SampleBlock& b) {
                       return evaluate_calibration(cal, b.scores(), b.outcomes()).value;
                     },
                     cal});
  };

  if (config.metrics.count("drmsce"))
    add_calibration({"drmsce", BinningScheme::EqualMass, CalibrationEstimator::DebiasedRmsce,
                     BinPolicy::adaptive(min_per_bin)});
  if (config.metrics.count("ece-baselines")) {
    add_calibration(
        {"ece_15", BinningScheme::EqualWidth, CalibrationEstimator::EceL1, BinPolicy::fixed(15)});
    add_calibration(
        {"ace_15", BinningScheme::EqualMass, CalibrationEstimator::EceL1, BinPolicy::fixed(15)});
  }
  if (config.metrics.count("auroc"))
    specs.push_back({"auroc", false,
                     [](const SampleBlock& b) { return auroc(b.scores(), b.outcomes()); },
                     std::nullopt});
  if (config.metrics.count("auprg"))
    specs.push_back({"auprg", false,
                     [](const SampleBlock& b) { return auprg(b.scores(), b.outcomes()); },
                     std::nullopt});
  if (config.metrics.count("eur")) {
    auto range = config.threshold_range;
    specs.push_back({"eur", true,
                     [range](const SampleBlock& b) -> std::optional<double> {
                       auto v = eur(b.scores(), b.outcomes(), b.in_group(), range);
                       if (!v) return std::nullopt;
                       return v->value;
                     },
                     std::nullopt});
  }
  return specs;
}

std::string missing_reason_for(const MetricSpec& spec, const SampleBlock& block) {
  if (spec.calibration) {
    auto r = evaluate_calibration(*spec.calibration, block.scores(), block.outcomes());
    return r.missing_reason.empty() ? "undefined" : r.missing_reason;
  }
  if (spec.name == "eur") {
    auto target = target_representation(block.outcomes(), block.in_group());
    if (!target) return "no_positives";
    if (*target == 0.0) return "no_group_positives";
    return "no_draws_in_range";
  }
  // auroc / auprg
  return "single_class";
}

GroupReport compute_group_report(const AuditConfig& config, const GroupIndex& group,
                                 const std::vector<MetricSpec>& specs,
                                 const SampleBlock& full_sorted,
                                 std::span<const std::uint32_t> sorted_of_row) {
  GroupReport report;
  report.definition = group.definition;
  report.size = group.size;
  report.positive_count = group.positive_count;
  report.base_rate = double(group.positive_count) / double(group.size);

  // Group slice in score order (positions through the dataset sort).
  std::vector<std::uint32_t> positions;
  positions.reserve(group.row_indices.size());
  for (auto row : group.row_indices) positions.push_back(sorted_of_row[row]);
  std::sort(positions.begin(), positions.end());

  std::vector<double> slice_scores;
  std::vector<std::uint8_t> slice_outcomes;
  slice_scores.reserve(positions.size());
  slice_outcomes.reserve(positions.size());
  for (auto p : positions) {
    slice_scores.push_back(full_sorted.scores()[p]);
    slice_outcomes.push_back(full_sorted.outcomes()[p]);
  }
  SampleBlock slice_block(std::move(slice_scores), std::move(slice_outcomes));

  // Full-sample block with this group's membership mask (group-context
  // metrics resample the whole test set).
  std::optional<SampleBlock> context_block;
  auto make_context = [&]() -> const SampleBlock& {
    if (!context_block) {
      std::vector<std::uint8_t> mask(full_sorted.size(), 0);
      for (auto p : positions) mask[p] = 1;
      context_block.emplace(
          std::vector<double>(full_sorted.scores().begin(), full_sorted.scores().end()),
          std::vector<std::uint8_t>(full_sorted.outcomes().begin(), full_sorted.outcomes().end()),
          std::move(mask));
    }
    return *context_block;
  };

  const BootstrapPlan plan = config.plan();
  for (const auto& spec : specs) {
    const SampleBlock& block = spec.needs_group_context ? make_context() : slice_block;
    MetricReport mr;
    mr.name = spec.name;
    const std::uint64_t stream_id =
        fnv1a64(group.definition.display_name + "|" + spec.name);
    if (config.n_bootstrap > 0) {
      mr.estimate = bootstrap_metric(block, spec.fn, plan, stream_id);
    } else {
      mr.estimate.point_estimate = spec.fn(block);
    }
    if (!mr.estimate.point_estimate)
      mr.missing_reason = missing_reason_for(spec, block);
    if (spec.calibration) {
      auto r = evaluate_calibration(*spec.calibration, block.scores(), block.outcomes());
      if (r.value) mr.realized_bins = r.realized_bins;
    }
    if (spec.name == "eur") {
      if (auto v = eur(block.scores(), block.outcomes(), block.in_group(), config.threshold_range))
        mr.skipped_draws = v->skipped_draws;
    }
    report.metrics.push_back(std::move(mr));
  }

  if (config.curves) {
    const bool bands = config.curve_bands && config.n_bootstrap > 0;
    auto with_bands = [&](const SampleBlock& block, const GridCurveFn& fn,
                          std::span<const double> grid, const std::string& kind) {
      CurveSeries curve;
      if (bands) {
        curve = bootstrap_curve(block, fn, grid, plan,
                                fnv1a64(group.definition.display_name + "|curve:" + kind));
      } else {
        curve.x.assign(grid.begin(), grid.end());
        curve.y = fn(block);
      }
      return curve;
    };

    if (slice_block.size() >= 10) {
      auto grid = linspace(slice_block.scores().front(), slice_block.scores().back(),
                           config.loess_grid);
      double span = config.loess_span;
      auto fn = [span, grid](const SampleBlock& b) {
        return loess_fit_on_grid(b.scores(), b.outcomes(), span, grid);
      };
      auto curve = with_bands(slice_block, fn, grid, "reliability");
      curve.x_label = "predicted risk";
      curve.y_label = "observed frequency";
      report.curves.emplace_back("reliability", std::move(curve));
    }

    if (auto base = roc_curve(slice_block.scores(), slice_block.outcomes())) {
      CurveSeries curve;
      if (bands) {
        auto grid = linspace(0.0, 1.0, 101);
        curve = with_bands(slice_block,
                           [grid](const SampleBlock& b) { return roc_on_grid(b, grid); }, grid,
                           "roc");
      } else {
        curve = std::move(*base);
      }
      curve.x_label = "false positive rate";
      curve.y_label = "true positive rate";
      report.curves.emplace_back("roc", std::move(curve));
    }

    if (auto base = prg_curve(slice_block.scores(), slice_block.outcomes())) {
      CurveSeries curve;
      if (bands) {
        auto grid = linspace(0.0, 1.0, 101);
        curve = with_bands(slice_block,
                           [grid](const SampleBlock& b) { return prg_on_grid(b, grid); }, grid,
                           "prg");
      } else {
        curve = std::move(*base);
      }
      curve.x_label = "recall gain";
      curve.y_label = "precision gain";
      report.curves.emplace_back("prg", std::move(curve));
    }

    {
      auto grid = threshold_grid(full_sorted.scores(), config.threshold_range,
                                 kRepresentationGridCap);
      if (!grid.empty()) {
        const SampleBlock& block = make_context();
        auto curve = with_bands(
            block, [grid](const SampleBlock& b) { return representation_on_grid(b, grid); },
            grid, "representation");
        curve.x_label = "decision threshold";
        curve.y_label = "normalized representation";
        report.curves.emplace_back("representation", std::move(curve));
      }
    }

    report.curves.emplace_back(
        "score_hist", score_histogram(slice_block.scores(), config.score_hist_bins));
  }

  return report;
}

}  // namespace

AuditReport run_audit(const AuditConfig& config, const Dataset& dataset) {
  for (const auto& name : config.sensitive_attributes)
    dataset.attribute_index(name);  // throws on unknown attribute

  auto groups = enumerate_groups(dataset, config.sensitive_attributes, config.max_combination,
                                 config.min_group_size);

  // One score-sorted copy of the full sample shared by all groups.
  std::vector<std::uint32_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return dataset.score(a) < dataset.score(b);
  });
  std::vector<std::uint32_t> sorted_of_row(dataset.size());
  std::vector<double> sorted_scores(dataset.size());
  std::vector<std::uint8_t> sorted_outcomes(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    sorted_of_row[order[i]] = static_cast<std::uint32_t>(i);
    sorted_scores[i] = dataset.score(order[i]);
    sorted_outcomes[i] = static_cast<std::uint8_t>(dataset.outcome(order[i]));
  }
  SampleBlock full_sorted(std::move(sorted_scores), std::move(sorted_outcomes));

  const auto specs = build_metric_specs(config);

  AuditReport report;
  report.groups.resize(groups.size());
  parallel_for(groups.size(), config.jobs, [&](std::size_t i) {
    report.groups[i] =
        compute_group_report(config, groups[i], specs, full_sorted, sorted_of_row);
  });

  report.effective_config = effective_config_json(config);
  report.digest = config_digest(config);
  return report;
}

AuditReport run_audit(const AuditConfig& config) {
  if (config.input_path.empty()) throw ConfigError("no input file given");
  RawTable table;
  try {
    table = read_table(config.input_path, config.delimiter);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }

  AttributeSchema schema;
  try {
    for (const auto& name : config.sensitive_attributes) {
      auto declared = config.attribute_values.find(name);
      if (declared != config.attribute_values.end()) {
        schema.push_back({name, declared->second});
      } else {
        auto inferred = infer_schema(table, {name});
        schema.push_back(std::move(inferred.front()));
      }
    }
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }

  ValidatedDataset validated = [&] {
    try {
      return validate_dataset(table, schema, config.score_column, config.outcome_column);
    } catch (const std::exception& e) {
      throw DataError(e.what());
    }
  }();
  if (!validated.rejected.empty()) {
    std::ostringstream msg;
    msg << validated.rejected.size() << " row(s) failed validation:";
    std::size_t shown = 0;
    for (const auto& d : validated.rejected) {
      if (shown++ == 10) {
        msg << "\n  ...";
        break;
      }
      msg << "\n  row " << d.row << ": " << d.message;
    }
    throw DataError(msg.str());
  }

  return run_audit(config, validated.dataset);
}

// -----------------------------------------------------------------------
// report emission

std::string group_slug(const std::string& display_name) {
  std::string slug;
  for (char c : display_name) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '=' || c == '.' || c == '-')
      slug.push_back(c);
    else if (c == ' ' || c == '&')
      slug.push_back('_');
    else
      slug.push_back('-');
  }
  // collapse runs of '_' from " & " separators
  std::string out;
  for (char c : slug) {
    if (c == '_' && !out.empty() && out.back() == '_') continue;
    out.push_back(c);
  }
  return out.empty() ? "group" : out;
}

void write_curve_file(const CurveSeries& curve, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "x,y,lower,upper\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << format_double(curve.x[i]) << ',';
    out << (std::isnan(curve.y[i]) ? "" : format_double(curve.y[i])) << ',';
    if (curve.has_bands() && !std::isnan(curve.lower[i])) out << format_double(curve.lower[i]);
    out << ',';
    if (curve.has_bands() && !std::isnan(curve.upper[i])) out << format_double(curve.upper[i]);
    out << '\n';
  }
}

CurveSeries read_curve_file(const std::string& path) {
  RawTable table = read_table(path, ',');
  CurveSeries curve;
  bool any_band = false;
  for (const auto& row : table.rows) {
    curve.x.push_back(std::stod(row[0]));
    curve.y.push_back(row[1].empty() ? kNaN : std::stod(row[1]));
    curve.lower.push_back(row[2].empty() ? kNaN : std::stod(row[2]));
    curve.upper.push_back(row[3].empty() ? kNaN : std::stod(row[3]));
    if (!row[2].empty() || !row[3].empty()) any_band = true;
  }
  if (!any_band) {
    curve.lower.clear();
    curve.upper.clear();
  }
  return curve;
}

namespace {

json estimate_to_json(const MetricReport& mr) {
  json j;
  j["point"] = mr.estimate.point_estimate ? json(*mr.estimate.point_estimate) : json(nullptr);
  j["median"] = mr.estimate.median ? json(*mr.estimate.median) : json(nullptr);
  j["ci_lower"] = mr.estimate.ci_lower ? json(*mr.estimate.ci_lower) : json(nullptr);
  j["ci_upper"] = mr.estimate.ci_upper ? json(*mr.estimate.ci_upper) : json(nullptr);
  j["replicates_used"] = mr.estimate.n_replicates_used;
  j["replicates_dropped"] = mr.estimate.n_replicates_dropped;
  j["reliability"] = mr.estimate.unreliable ? "unreliable" : "ok";
  if (mr.realized_bins) j["realized_bins"] = *mr.realized_bins;
  if (mr.skipped_draws) j["skipped_draws"] = *mr.skipped_draws;
  if (!mr.missing_reason.empty()) j["missing_reason"] = mr.missing_reason;
  return j;
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

// Metric columns in first-seen order (groups all share the enabled set).
std::vector<std::string> metric_columns(const AuditReport& report) {
  std::vector<std::string> names;
  for (const auto& g : report.groups)
    for (const auto& m : g.metrics)
      if (std::find(names.begin(), names.end(), m.name) == names.end()) names.push_back(m.name);
  return names;
}

}  // namespace

json report_to_json(const AuditReport& report) {
  json doc;
  doc["run"] = {{"tool", "riskaudit"},
                {"version", report.tool_version},
                {"config_digest", report.digest}};
  doc["config"] = report.effective_config;
  doc["groups"] = json::array();

  for (const auto& g : report.groups) {
    json jg;
    jg["name"] = g.definition.display_name;
    json conditions = json::object();
    for (const auto& [attr, value] : g.definition.conditions) conditions[attr] = value;
    jg["conditions"] = conditions;
    jg["size"] = g.size;
    jg["positive_count"] = g.positive_count;
    jg["base_rate"] = g.base_rate;
    jg["metrics"] = json::object();
    for (const auto& m : g.metrics) jg["metrics"][m.name] = estimate_to_json(m);
    if (!g.curves.empty()) {
      const std::string slug = group_slug(g.definition.display_name);
      json curve_refs = json::object();
      for (const auto& [kind, curve] : g.curves)
        curve_refs[kind] = "curves/" + slug + "/" + kind + ".csv";
      jg["curves"] = curve_refs;
    }
    doc["groups"].push_back(std::move(jg));
  }
  return doc;
}

std::string report_to_csv(const AuditReport& report) {
  const auto metric_names = metric_columns(report);
  std::ostringstream csv;
  csv << "group,size,positive_count,base_rate";
  for (const auto& name : metric_names)
    csv << ',' << name << ',' << name << "_median," << name << "_ci_lower," << name
        << "_ci_upper," << name << "_used," << name << "_dropped," << name << "_reliability,"
        << name << "_reason";
  csv << '\n';

  for (const auto& g : report.groups) {
    csv << escape_cell(g.definition.display_name) << ',' << g.size << ',' << g.positive_count
        << ',' << format_double(g.base_rate);
    for (const auto& name : metric_names) {
      auto it = std::find_if(g.metrics.begin(), g.metrics.end(),
                             [&](const MetricReport& m) { return m.name == name; });
      if (it == g.metrics.end()) {
        csv << ",NA,NA,NA,NA,NA,NA,NA,not_computed";
        continue;
      }
      csv << ',' << cell(it->estimate.point_estimate) << ',' << cell(it->estimate.median) << ','
          << cell(it->estimate.ci_lower) << ',' << cell(it->estimate.ci_upper) << ','
          << it->estimate.n_replicates_used << ',' << it->estimate.n_replicates_dropped << ','
          << (it->estimate.unreliable ? "unreliable" : "ok") << ','
          << (it->missing_reason.empty() ? "-" : it->missing_reason);
    }
    csv << '\n';
  }
  return csv.str();
}

std::vector<std::string> emit_report(const AuditReport& report, const std::string& output_dir) {
  fs::create_directories(output_dir);
  std::vector<std::string> written;

  for (const auto& g : report.groups) {
    if (g.curves.empty()) continue;
    const std::string slug = group_slug(g.definition.display_name);
    fs::create_directories(fs::path(output_dir) / "curves" / slug);
    for (const auto& [kind, curve] : g.curves) {
      std::string rel = "curves/" + slug + "/" + kind + ".csv";
      write_curve_file(curve, (fs::path(output_dir) / rel).string());
      written.push_back(rel);
    }
  }

  {
    std::ofstream out(fs::path(output_dir) / "report.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report.json");
    out << report_to_json(report).dump(2) << '\n';
    written.push_back("report.json");
  }
  {
    std::ofstream out(fs::path(output_dir) / "metrics_by_group.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write metrics_by_group.csv");
    out << report_to_csv(report);
    written.push_back("metrics_by_group.csv");
  }
  return written;
}

// -----------------------------------------------------------------------
// benchmark entry points

BiasStudyConfig load_bias_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }

  static const std::set<std::string> known_keys = {"sample_sizes", "n_repetitions", "scenarios",
                                                   "seed", "metrics"};
  for (const auto& [key, _] : j.items())
    if (!known_keys.count(key)) throw ConfigError("unknown config key: " + key);

  BiasStudyConfig c;
  try {
    if (j.contains("sample_sizes"))
      c.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
    if (j.contains("n_repetitions")) c.n_repetitions = j.at("n_repetitions").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("scenarios")) {
      c.scenarios.clear();
      for (const auto& s : j.at("scenarios")) {
        auto parsed = parse_scenario(s.get<std::string>());
        if (!parsed) throw ConfigError("unknown scenario: " + s.get<std::string>());
        c.scenarios.push_back(*parsed);
      }
    }
    if (j.contains("metrics")) {
      // select from the default panel by label
      auto panel = default_bias_metric_panel();
      c.metrics.clear();
      for (const auto& label : j.at("metrics")) {
        auto it = std::find_if(panel.begin(), panel.end(), [&](const auto& m) {
          return m.label == label.get<std::string>();
        });
        if (it == panel.end()) throw ConfigError("unknown metric label: " + label.get<std::string>());
        c.metrics.push_back(*it);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

std::vector<std::string> run_bias_benchmark(const BiasStudyConfig& config,
                                            const std::string& output_dir) {
  BiasStudyResult result = run_bias_study(config);
  fs::create_directories(output_dir);
  std::vector<std::string> written;

  {
    std::ofstream out(fs::path(output_dir) / "bias_study.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write bias_study.csv");
    out << "metric,scenario,sample_size,repetition,value\n";
    for (const auto& cell : result.cells)
      for (std::size_t rep = 0; rep < cell.values.size(); ++rep)
        out << cell.metric_label << ',' << scenario_name(cell.scenario) << ','
            << cell.sample_size << ',' << rep << ','
            << (cell.values[rep] ? format_double(*cell.values[rep]) : "NA") << '\n';
    written.push_back("bias_study.csv");
  }
  {
    std::ofstream out(fs::path(output_dir) / "ground_truth.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write ground_truth.csv");
    out << "scenario,ground_truth_ece,ground_truth_rmsce\n";
    for (Scenario s : {Scenario::Perfect, Scenario::Square}) {
      auto gt = ground_truth_errors(s);
      out << scenario_name(s) << ',' << format_double(gt.ece) << ',' << format_double(gt.rmsce)
          << '\n';
    }
    written.push_back("ground_truth.csv");
  }
  return written;
}

std::vector<std::string> run_twogroup_benchmark(std::size_t n_per_group, std::uint64_t seed,
                                                int n_bootstrap, const std::string& output_dir,
                                                int jobs) {
  Dataset dataset = generate_two_group_example(n_per_group, seed);
  fs::create_directories(output_dir);
  std::vector<std::string> written;

  {
    std::ofstream out(fs::path(output_dir) / "twogroup_data.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write twogroup_data.csv");
    out << "score,outcome,group\n";
    for (std::size_t i = 0; i < dataset.size(); ++i)
      out << format_double(dataset.score(i)) << ',' << dataset.outcome(i) << ','
          << dataset.attribute_value(0, i) << '\n';
    written.push_back("twogroup_data.csv");
  }

  AuditConfig config;
  config.input_path = "twogroup_data.csv";
  config.sensitive_attributes = {"group"};
  config.max_combination = 1;
  config.min_group_size = 1;
  config.n_bootstrap = n_bootstrap;
  config.seed = seed;
  config.jobs = jobs;
  config.metrics = {"drmsce", "auroc", "auprg", "eur"};

  AuditReport report = run_audit(config, dataset);
  auto files = emit_report(report, output_dir);
  written.insert(written.end(), files.begin(), files.end());
  return written;
}

}  // namespace riskaudit
