#include <algorithm>
#include <cstdint>
#include <numeric>

#include "internal.hpp"
#include "windclime/error.hpp"

namespace windclime::learn {

RocCurve roc_curve_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw ValidationError("roc_curve_auc needs parallel non-empty scores and labels");
  }
  std::int64_t positives = 0, negatives = 0;
  for (int label : labels) {
    (label != 0 ? positives : negatives) += 1;
  }
  if (positives == 0 || negatives == 0) {
    throw ValidationError("roc_curve_auc requires both classes present");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::int64_t tp = 0, fp = 0;
  // Integer accumulation: 2x the trapezoid area in units of 1/(P*N). This
  // makes the result identical to pairwise concordance with half ties.
  std::int64_t auc_num2 = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    std::int64_t d_tp = 0, d_fp = 0;
    while (i < order.size() && scores[order[i]] == threshold) {
      (labels[order[i]] != 0 ? d_tp : d_fp) += 1;
      ++i;
    }
    auc_num2 += d_fp * (2 * tp + d_tp);
    tp += d_tp;
    fp += d_fp;
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives),
                            threshold});
  }
  curve.auc = static_cast<double>(auc_num2) /
              (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
  return curve;
}

MetricsReport evaluate(const TrainedClassifier& model, const Dataset& test) {
  test.validate();
  if (test.size() == 0) {
    throw ValidationError("empty test set");
  }
  const std::size_t nc = model.classes.size();
  MetricsReport report;
  report.classes = model.classes;
  report.confusion.assign(nc, std::vector<std::int64_t>(nc, 0));
  report.precision.assign(nc, 0.0);
  report.recall.assign(nc, 0.0);
  report.auc.assign(nc, 0.0);
  report.roc.assign(nc, RocCurve{});

  std::vector<std::vector<double>> per_class_scores(nc);
  std::vector<std::size_t> predicted(test.size());
  std::vector<std::size_t> actual(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const Prediction pred = predict(model, test.features[i]);
    const auto pred_it = std::find(model.classes.begin(), model.classes.end(), pred.label);
    predicted[i] = static_cast<std::size_t>(pred_it - model.classes.begin());
    const auto act_it = std::find(model.classes.begin(), model.classes.end(), test.labels[i]);
    if (act_it == model.classes.end()) {
      throw ValidationError("test label '" + features::to_string(test.labels[i]) +
                            "' unseen by the model");
    }
    actual[i] = static_cast<std::size_t>(act_it - model.classes.begin());
    for (std::size_t c = 0; c < nc; ++c) {
      per_class_scores[c].push_back(pred.scores[c]);
    }
  }

  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    report.confusion[actual[i]][predicted[i]] += 1;
    if (actual[i] == predicted[i]) {
      ++correct;
    }
  }
  report.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());

  double auc_sum = 0.0;
  int auc_defined = 0;
  for (std::size_t c = 0; c < nc; ++c) {
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const bool is_c_actual = actual[i] == c;
      const bool is_c_pred = predicted[i] == c;
      tp += is_c_actual && is_c_pred;
      fp += !is_c_actual && is_c_pred;
      fn += is_c_actual && !is_c_pred;
    }
    const std::string name = features::to_string(model.classes[c]);
    if (tp + fp > 0) {
      report.precision[c] = static_cast<double>(tp) / static_cast<double>(tp + fp);
    } else {
      report.flags.push_back("precision undefined (0/0) for " + name + "; reported 0");
    }
    if (tp + fn > 0) {
      report.recall[c] = static_cast<double>(tp) / static_cast<double>(tp + fn);
    } else {
      report.flags.push_back("recall undefined (0/0) for " + name + "; reported 0");
    }

    std::vector<int> binary(test.size());
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < test.size(); ++i) {
      binary[i] = actual[i] == c ? 1 : 0;
      (binary[i] != 0 ? has_pos : has_neg) = true;
    }
    if (has_pos && has_neg) {
      report.roc[c] = roc_curve_auc(per_class_scores[c], binary);
      report.auc[c] = report.roc[c].auc;
      auc_sum += report.auc[c];
      ++auc_defined;
    } else {
      report.flags.push_back("ROC undefined for " + name + " (single-class test)");
    }
  }
  report.macro_auc = auc_defined > 0 ? auc_sum / auc_defined : 0.0;
  return report;
}

MetricsReport cross_station_evaluate(const TrainedClassifier& model,
                                     const Dataset& other_station) {
  return evaluate(model, other_station);
}

}  // namespace windclime::learn
