#include "riskaudit/discrimination.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace riskaudit {

namespace {

// Views over score-ascending data; owns sorted copies only when the input
// was unsorted (the bootstrap engine always hands over sorted blocks).
struct SortedPair {
  std::vector<double> score_store;
  std::vector<std::uint8_t> outcome_store;
  std::span<const double> scores;
  std::span<const std::uint8_t> outcomes;
};

SortedPair sort_by_score(std::span<const double> scores, std::span<const std::uint8_t> outcomes) {
  if (scores.size() != outcomes.size())
    throw std::invalid_argument("scores/outcomes length mismatch");
  SortedPair p;
  if (std::is_sorted(scores.begin(), scores.end())) {
    p.scores = scores;
    p.outcomes = outcomes;
    return p;
  }
  std::vector<std::uint32_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return scores[a] < scores[b]; });
  p.score_store.resize(scores.size());
  p.outcome_store.resize(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    p.score_store[i] = scores[order[i]];
    p.outcome_store[i] = outcomes[order[i]];
  }
  p.scores = p.score_store;
  p.outcomes = p.outcome_store;
  return p;
}

std::size_t count_positives(std::span<const std::uint8_t> outcomes) {
  std::size_t pos = 0;
  for (auto o : outcomes) pos += o;
  return pos;
}

// Walks tie blocks of the ascending-sorted sample from the top score down,
// reporting cumulative (tp, fp) after each block. This is the one sweep
// shared by the ROC and PRG constructions.
template <typename Visit>
void sweep_descending(const SortedPair& p, Visit&& visit) {
  const std::size_t n = p.scores.size();
  std::size_t tp = 0, fp = 0;
  std::size_t i = n;
  while (i > 0) {
    std::size_t j = i;
    while (j > 0 && p.scores[j - 1] == p.scores[i - 1]) --j;
    for (std::size_t k = j; k < i; ++k) {
      tp += p.outcomes[k];
      fp += 1 - p.outcomes[k];
    }
    visit(p.scores[i - 1], tp, fp);
    i = j;
  }
}

}  // namespace

std::optional<CurveSeries> roc_curve(std::span<const double> scores,
                                     std::span<const std::uint8_t> outcomes) {
  SortedPair p = sort_by_score(scores, outcomes);
  const std::size_t n_pos = count_positives(p.outcomes);
  const std::size_t n_neg = p.outcomes.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  CurveSeries curve;
  curve.x_label = "false positive rate";
  curve.y_label = "true positive rate";
  curve.x.push_back(0.0);
  curve.y.push_back(0.0);
  sweep_descending(p, [&](double, std::size_t tp, std::size_t fp) {
    curve.x.push_back(double(fp) / double(n_neg));
    curve.y.push_back(double(tp) / double(n_pos));
  });
  return curve;
}

std::optional<double> auroc(std::span<const double> scores,
                            std::span<const std::uint8_t> outcomes) {
  SortedPair p = sort_by_score(scores, outcomes);
  const std::size_t n = p.scores.size();
  const std::size_t n_pos = count_positives(p.outcomes);
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::nullopt;

  // Sum of positive midranks over tie blocks.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    std::size_t pos_in_block = p.outcomes[i];
    while (j < n && p.scores[j] == p.scores[i]) {
      pos_in_block += p.outcomes[j];
      ++j;
    }
    double midrank = 0.5 * double(i + 1 + j);  // mean of ranks i+1 .. j
    rank_sum += midrank * double(pos_in_block);
    i = j;
  }
  return (rank_sum - 0.5 * double(n_pos) * double(n_pos + 1)) / (double(n_pos) * double(n_neg));
}

std::optional<CurveSeries> prg_curve(std::span<const double> scores,
                                     std::span<const std::uint8_t> outcomes) {
  SortedPair p = sort_by_score(scores, outcomes);
  const std::size_t n = p.scores.size();
  const std::size_t n_pos = count_positives(p.outcomes);
  if (n_pos == 0 || n_pos == n) return std::nullopt;
  const double pi = double(n_pos) / double(n);

  CurveSeries curve;
  curve.x_label = "recall gain";
  curve.y_label = "precision gain";
  sweep_descending(p, [&](double, std::size_t tp, std::size_t fp) {
    if (tp == 0) return;  // recall gain is -inf below any recall
    double rec = double(tp) / double(n_pos);
    double prec = double(tp) / double(tp + fp);
    double rec_gain = (rec - pi) / ((1.0 - pi) * rec);
    if (rec_gain < 0.0) return;
    double prec_gain = (prec - pi) / ((1.0 - pi) * prec);
    curve.x.push_back(rec_gain);
    curve.y.push_back(prec_gain);
  });
  return curve;
}

std::optional<double> auprg(std::span<const double> scores,
                            std::span<const std::uint8_t> outcomes) {
  SortedPair p = sort_by_score(scores, outcomes);
  const std::size_t n = p.scores.size();
  const std::size_t n_pos = count_positives(p.outcomes);
  if (n_pos == 0 || n_pos == n) return std::nullopt;
  const double pi = double(n_pos) / double(n);

  // Operating points in gain space, negative recall gains included; the
  // sweep yields them in nondecreasing recall-gain order.
  std::vector<double> xs, ys;
  sweep_descending(p, [&](double, std::size_t tp, std::size_t fp) {
    if (tp == 0) return;
    double rec = double(tp) / double(n_pos);
    double prec = double(tp) / double(tp + fp);
    xs.push_back((rec - pi) / ((1.0 - pi) * rec));
    ys.push_back((prec - pi) / ((1.0 - pi) * prec));
  });

  // Clip the polyline to recall gain in [0,1]: interpolate the segment
  // crossing zero, or extend flat from the first point when the sweep
  // starts inside the range (the limit of the step up from zero recall).
  std::size_t first = 0;
  while (first < xs.size() && xs[first] < 0.0) ++first;
  if (first == xs.size()) return 0.0;  // unreachable: select-all sits at 1
  double y0;
  if (xs[first] == 0.0) {
    y0 = ys[first];
    ++first;
  } else if (first == 0) {
    y0 = ys.front();
  } else {
    double t = (0.0 - xs[first - 1]) / (xs[first] - xs[first - 1]);
    y0 = ys[first - 1] + t * (ys[first] - ys[first - 1]);
  }

  // Integrate, folding runs of constant precision gain into single
  // rectangles so flat stretches (a perfect ranking's entire polyline)
  // carry no accumulation error.
  double area = 0.0;
  double run_x = 0.0, run_y = y0;  // start of the current flat run
  double prev_x = 0.0, prev_y = y0;
  for (std::size_t i = first; i < xs.size(); ++i) {
    if (ys[i] == prev_y) {
      prev_x = xs[i];
      continue;
    }
    area += run_y * (prev_x - run_x);  // flush the flat run
    area += 0.5 * (prev_y + ys[i]) * (xs[i] - prev_x);
    prev_x = xs[i];
    prev_y = ys[i];
    run_x = xs[i];
    run_y = ys[i];
  }
  area += run_y * (prev_x - run_x);
  return area;
}

double trapezoid_area(const CurveSeries& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    area += 0.5 * (curve.x[i] - curve.x[i - 1]) * (curve.y[i] + curve.y[i - 1]);
  return area;
}

}  // namespace riskaudit
