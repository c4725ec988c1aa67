#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "riskaudit/audit.hpp"
#include "riskaudit/bootstrap.hpp"
#include "riskaudit/calibration.hpp"
#include "riskaudit/discrimination.hpp"
#include "riskaudit/ranking.hpp"
#include "riskaudit/synthetic.hpp"

namespace py = pybind11;
using namespace riskaudit;

namespace {

BinningScheme parse_binning(const std::string& name) {
  if (name == "equal-width") return BinningScheme::EqualWidth;
  if (name == "equal-mass") return BinningScheme::EqualMass;
  throw std::invalid_argument("scheme must be 'equal-width' or 'equal-mass'");
}

Scenario parse_scenario_or_throw(const std::string& name) {
  auto s = parse_scenario(name);
  if (!s) throw std::invalid_argument("scenario must be 'perfect' or 'square'");
  return *s;
}

std::optional<ThresholdRange> parse_range(const std::optional<std::pair<double, double>>& r) {
  if (!r) return std::nullopt;
  return ThresholdRange{r->first, r->second};
}

py::object curve_to_py(const std::optional<CurveSeries>& curve) {
  if (!curve) return py::none();
  py::dict d;
  d["x"] = curve->x;
  d["y"] = curve->y;
  if (curve->has_bands()) {
    d["lower"] = curve->lower;
    d["upper"] = curve->upper;
  }
  return d;
}

py::dict estimate_to_py(const MetricEstimate& est) {
  py::dict d;
  d["point"] = est.point_estimate ? py::cast(*est.point_estimate) : py::none();
  d["median"] = est.median ? py::cast(*est.median) : py::none();
  d["ci_lower"] = est.ci_lower ? py::cast(*est.ci_lower) : py::none();
  d["ci_upper"] = est.ci_upper ? py::cast(*est.ci_upper) : py::none();
  d["replicates_used"] = est.n_replicates_used;
  d["replicates_dropped"] = est.n_replicates_dropped;
  d["reliable"] = !est.unreliable;
  return d;
}

using Scores = std::vector<double>;
using Outcomes = std::vector<std::uint8_t>;

}  // namespace

PYBIND11_MODULE(_riskaudit, m) {
  m.doc() = "Per-group risk score evaluation: calibration error (including the "
            "debiased adaptive-bin-count estimator), AUROC/AUPRG, expected "
            "under-representation, and deterministic test-set bootstrap.";

  // ---- calibration
  m.def(
      "ece",
      [](const Scores& s, const Outcomes& o, std::size_t n_bins, const std::string& scheme) {
        return ece(bin_samples(s, o, n_bins, parse_binning(scheme)));
      },
      py::arg("scores"), py::arg("outcomes"), py::arg("n_bins") = 15,
      py::arg("scheme") = "equal-width",
      "Expected calibration error on the given binning.");

  m.def(
      "rmsce",
      [](const Scores& s, const Outcomes& o, std::size_t n_bins, const std::string& scheme) {
        return rmsce(bin_samples(s, o, n_bins, parse_binning(scheme)));
      },
      py::arg("scores"), py::arg("outcomes"), py::arg("n_bins") = 15,
      py::arg("scheme") = "equal-width");

  m.def(
      "debiased_rmsce",
      [](const Scores& s, const Outcomes& o, std::size_t n_bins, const std::string& scheme) {
        return debiased_rmsce(bin_samples(s, o, n_bins, parse_binning(scheme)));
      },
      py::arg("scores"), py::arg("outcomes"), py::arg("n_bins") = 15,
      py::arg("scheme") = "equal-mass",
      "Bias-corrected RMSCE; None when a bin has fewer than 2 samples.");

  m.def(
      "drmsce",
      [](const Scores& s, const Outcomes& o, std::size_t min_per_bin) {
        return drmsce(s, o, min_per_bin);
      },
      py::arg("scores"), py::arg("outcomes"), py::arg("min_per_bin") = 10,
      "Debiased RMSCE with the adaptive bin count search (equal-mass bins).");

  m.def(
      "max_monotonic_bins",
      [](const Scores& s, const Outcomes& o, std::size_t min_per_bin, const std::string& scheme,
         bool exact) {
        return max_monotonic_bins(s, o, min_per_bin, parse_binning(scheme),
                                  exact ? BinSearch::LinearScan : BinSearch::Binary);
      },
      py::arg("scores"), py::arg("outcomes"), py::arg("min_per_bin") = 10,
      py::arg("scheme") = "equal-mass", py::arg("exact") = false,
      "Largest bin count whose calibration curve stays monotonic.");

  m.def(
      "reliability_curve",
      [](const Scores& s, const Outcomes& o, double span, std::size_t grid_size) {
        return curve_to_py(reliability_curve(s, o, span, grid_size));
      },
      py::arg("scores"), py::arg("outcomes"), py::arg("span") = 0.75,
      py::arg("grid_size") = 101, "Loess reliability curve as {'x': ..., 'y': ...}.");

  // ---- discrimination
  m.def(
      "auroc", [](const Scores& s, const Outcomes& o) { return auroc(s, o); },
      py::arg("scores"), py::arg("outcomes"),
      "Concordance AUROC (ties count 0.5); None for single-class inputs.");
  m.def(
      "auprg", [](const Scores& s, const Outcomes& o) { return auprg(s, o); },
      py::arg("scores"), py::arg("outcomes"),
      "Area under the precision-recall-gain curve; None for single-class inputs.");
  m.def(
      "roc_curve",
      [](const Scores& s, const Outcomes& o) { return curve_to_py(roc_curve(s, o)); },
      py::arg("scores"), py::arg("outcomes"));
  m.def(
      "prg_curve",
      [](const Scores& s, const Outcomes& o) { return curve_to_py(prg_curve(s, o)); },
      py::arg("scores"), py::arg("outcomes"));

  // ---- ranking
  m.def(
      "target_representation",
      [](const Outcomes& o, const Outcomes& g) { return target_representation(o, g); },
      py::arg("outcomes"), py::arg("in_group"));
  m.def(
      "eur",
      [](const Scores& s, const Outcomes& o, const Outcomes& g,
         const std::optional<std::pair<double, double>>& range) -> std::optional<double> {
        auto v = eur(s, o, g, parse_range(range));
        if (!v) return std::nullopt;
        return v->value;
      },
      py::arg("scores"), py::arg("outcomes"), py::arg("in_group"),
      py::arg("threshold_range") = py::none(),
      "Expected under-representation of the masked group; None when the "
      "group has no positives.");
  m.def(
      "representation_curve",
      [](const Scores& s, const Outcomes& o, const Outcomes& g,
         const std::optional<std::pair<double, double>>& range) {
        return curve_to_py(representation_curve(s, o, g, parse_range(range)));
      },
      py::arg("scores"), py::arg("outcomes"), py::arg("in_group"),
      py::arg("threshold_range") = py::none());

  // ---- bootstrap
  m.def(
      "bootstrap_metric",
      [](const Scores& s, const Outcomes& o, const std::string& metric,
         const std::optional<Outcomes>& in_group, int n_replicates, double ci_level,
         std::uint64_t seed, std::uint64_t stream_id) {
        ScalarMetricFn fn;
        if (metric == "auroc")
          fn = [](const SampleBlock& b) { return auroc(b.scores(), b.outcomes()); };
        else if (metric == "auprg")
          fn = [](const SampleBlock& b) { return auprg(b.scores(), b.outcomes()); };
        else if (metric == "drmsce")
          fn = [](const SampleBlock& b) { return drmsce(b.scores(), b.outcomes()); };
        else if (metric == "eur")
          fn = [](const SampleBlock& b) -> std::optional<double> {
            auto v = eur(b.scores(), b.outcomes(), b.in_group(), std::nullopt);
            if (!v) return std::nullopt;
            return v->value;
          };
        else if (metric == "mean")
          fn = [](const SampleBlock& b) -> std::optional<double> {
            double sum = 0;
            for (auto y : b.outcomes()) sum += y;
            return sum / double(b.size());
          };
        else
          throw std::invalid_argument("metric must be auroc, auprg, drmsce, eur or mean");

        BootstrapPlan plan;
        plan.n_replicates = n_replicates;
        plan.ci_level = ci_level;
        plan.base_seed = seed;
        if (metric == "eur" && !in_group)
          throw std::invalid_argument("eur needs in_group");
        MetricEstimate est =
            in_group ? bootstrap_metric(SampleBlock(s, o, *in_group), fn, plan, stream_id)
                     : bootstrap_metric(SampleBlock(s, o), fn, plan, stream_id);
        return estimate_to_py(est);
      },
      py::arg("scores"), py::arg("outcomes"), py::arg("metric"),
      py::arg("in_group") = py::none(), py::arg("n_replicates") = 200,
      py::arg("ci_level") = 0.95, py::arg("seed") = 0, py::arg("stream_id") = 0,
      "Deterministic test-set bootstrap of a named metric.");

  // ---- synthetic benchmarks
  m.def(
      "generate_calibration_stream",
      [](std::size_t n, const std::string& scenario, std::uint64_t seed) {
        auto stream = generate_calibration_stream(n, parse_scenario_or_throw(scenario), seed);
        return py::make_tuple(stream.scores, stream.outcomes);
      },
      py::arg("n"), py::arg("scenario"), py::arg("seed") = 0);
  m.def(
      "ground_truth_errors",
      [](const std::string& scenario) {
        auto gt = ground_truth_errors(parse_scenario_or_throw(scenario));
        return py::make_tuple(gt.ece, gt.rmsce);
      },
      py::arg("scenario"));
  m.def(
      "generate_two_group_example",
      [](std::size_t n_per_group, std::uint64_t seed) {
        Dataset d = generate_two_group_example(n_per_group, seed);
        std::vector<double> scores(d.scores().begin(), d.scores().end());
        std::vector<int> outcomes(d.outcomes().begin(), d.outcomes().end());
        std::vector<std::string> groups;
        groups.reserve(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) groups.push_back(d.attribute_value(0, i));
        py::dict out;
        out["score"] = scores;
        out["outcome"] = outcomes;
        out["group"] = groups;
        return out;
      },
      py::arg("n_per_group"), py::arg("seed") = 0);

  // ---- end-to-end audit
  m.def(
      "run_audit",
      [](const std::string& config_json, const std::string& output_dir) {
        AuditConfig config = audit_config_from_json(nlohmann::json::parse(config_json));
        if (!output_dir.empty()) config.output_dir = output_dir;
        AuditReport report = run_audit(config);
        if (!output_dir.empty()) emit_report(report, output_dir);
        return report_to_json(report).dump();
      },
      py::arg("config_json"), py::arg("output_dir") = "",
      "Runs the full audit for a JSON config string; returns the report as "
      "a JSON string and, when output_dir is set, writes the file set.");

  m.attr("__version__") = kToolVersion;
}
