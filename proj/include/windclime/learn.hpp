#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "windclime/features.hpp"

namespace windclime::learn {

namespace detail {
class ClassifierImpl;
}

using features::Label;

struct Dataset {
  std::vector<std::vector<double>> features;
  std::vector<Label> labels;
  std::vector<std::string> ids;  // optional, parallel to rows when non-empty
  std::string station_id;

  std::size_t size() const { return features.size(); }
  std::size_t dimension() const { return features.empty() ? 0 : features[0].size(); }

  void push_row(std::vector<double> fv, Label label, std::string id = {});

  /// Consistent row lengths, parallel arrays; throws ValidationError.
  void validate() const;

  /// Classes present, in canonical label order.
  std::vector<Label> present_classes() const;

  Dataset subset(std::span<const std::size_t> indices) const;
};

enum class ModelKind { knn, naive_bayes, svm, gbdt, random_forest, logistic };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& text);  // throws ParseError

inline constexpr ModelKind kAllModelKinds[] = {
    ModelKind::knn,  ModelKind::naive_bayes,   ModelKind::svm,
    ModelKind::gbdt, ModelKind::random_forest, ModelKind::logistic};

struct Hyperparams {
  int knn_k = 5;
  double nb_var_floor = 1e-12;
  double svm_c = 1.0;
  double svm_gamma = 0.0;  // 0 selects 1 / n_features
  double svm_tol = 1e-3;   // KKT tolerance
  double lr_l2 = 1.0;
  double lr_tol = 1e-6;  // gradient-norm stop
  int rf_trees = 100;
  int gbdt_rounds = 100;
  int gbdt_depth = 3;
  double gbdt_learning_rate = 0.1;

  void validate() const;
};

/// Per-feature z-score parameters learned from the training split only.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> scale;  // 1.0 where the training std vanishes

  std::vector<double> apply(std::span<const double> fv) const;
};

struct TrainedClassifier {
  ModelKind kind = ModelKind::knn;
  Hyperparams hyper;
  Normalizer norm;
  std::vector<Label> classes;  // canonical order, classes seen in training
  std::uint64_t seed = 0;
  std::string data_fingerprint;
  std::shared_ptr<const detail::ClassifierImpl> impl;

  std::size_t n_features() const { return norm.mean.size(); }
};

struct Prediction {
  Label label = Label::other;
  std::vector<double> scores;  // parallel to model.classes, >= 0, sums to 1
};

/// Trains one model. Features are standardized internally with statistics of
/// `train` only. Throws ValidationError on a single-class training set and
/// NumericError when an optimizer fails to converge.
TrainedClassifier train_classifier(ModelKind kind, const Dataset& train,
                                   const Hyperparams& hyper, std::uint64_t seed);

/// Scores sum to 1 (within 1e-6 by construction); ties resolve to the first
/// class in the model's class order. Throws ValidationError on a wrong-length
/// vector.
Prediction predict(const TrainedClassifier& model, std::span<const double> fv);

/// Per-class shuffled split: floor(ratio * n_class) rows per class go to
/// train, the rest to test. Deterministic in `seed`.
std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double ratio,
                                             std::uint64_t seed);

/// Stratified fold ids (0..k-1 per row): per-class shuffle, then one
/// continuous round-robin deal so fold sizes differ by at most one overall
/// and per class.
std::vector<int> stratified_fold_assignment(const Dataset& dataset, int k,
                                            std::uint64_t seed);

struct CvReport {
  ModelKind kind = ModelKind::knn;
  int k = 0;
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
  double stddev_accuracy = 0.0;  // population std over folds
};

CvReport kfold_cross_validate(const Dataset& dataset, int k, ModelKind kind,
                              const Hyperparams& hyper, std::uint64_t seed);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/**
 * Threshold sweep over descending unique scores; labels are 0/1. The
 * trapezoid AUC equals the pairwise concordance probability with ties
 * counted 1/2 (both reduce to the same integer sum). Throws ValidationError
 * when only one class is present.
 */
RocCurve roc_curve_auc(std::span<const double> scores, std::span<const int> labels);

struct MetricsReport {
  std::vector<Label> classes;  // model class order
  std::vector<std::vector<std::int64_t>> confusion;  // [actual][predicted]
  std::vector<double> precision;  // one-vs-rest per class, 0/0 -> 0 with flag
  std::vector<double> recall;
  std::vector<double> auc;        // 0 with flag when undefined
  std::vector<RocCurve> roc;      // empty curve when undefined
  double accuracy = 0.0;
  double macro_auc = 0.0;  // mean of defined per-class AUCs
  std::vector<std::string> flags;
};

MetricsReport evaluate(const TrainedClassifier& model, const Dataset& test);

/// evaluate() across stations; the macro one-vs-rest AUC doubles as the
/// aggregate "average accuracy" figure.
MetricsReport cross_station_evaluate(const TrainedClassifier& model,
                                     const Dataset& other_station);

/// Versioned self-describing JSON artifact with a content hash.
void save_model(const TrainedClassifier& model, std::ostream& out);

/// Rejects unknown versions and hash mismatches with ValidationError.
TrainedClassifier load_model(std::istream& in);

std::string fingerprint_dataset(const Dataset& dataset);

}  // namespace windclime::learn
