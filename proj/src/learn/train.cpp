#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "windclime/error.hpp"
#include "windclime/learn.hpp"
#include "windclime/mathx.hpp"

namespace windclime::learn {

void Hyperparams::validate() const {
  if (knn_k < 1) throw ConfigError("knn_k must be >= 1");
  if (!(nb_var_floor > 0.0)) throw ConfigError("nb_var_floor must be > 0");
  if (!(svm_c > 0.0)) throw ConfigError("svm_c must be > 0");
  if (svm_gamma < 0.0) throw ConfigError("svm_gamma must be >= 0");
  if (!(svm_tol > 0.0)) throw ConfigError("svm_tol must be > 0");
  if (lr_l2 < 0.0) throw ConfigError("lr_l2 must be >= 0");
  if (!(lr_tol > 0.0)) throw ConfigError("lr_tol must be > 0");
  if (rf_trees < 1) throw ConfigError("rf_trees must be >= 1");
  if (gbdt_rounds < 1) throw ConfigError("gbdt_rounds must be >= 1");
  if (gbdt_depth < 1) throw ConfigError("gbdt_depth must be >= 1");
  if (!(gbdt_learning_rate > 0.0)) throw ConfigError("gbdt_learning_rate must be > 0");
}

std::vector<double> Normalizer::apply(std::span<const double> fv) const {
  std::vector<double> out(fv.size());
  for (std::size_t i = 0; i < fv.size(); ++i) {
    out[i] = (fv[i] - mean[i]) / scale[i];
  }
  return out;
}

namespace {

Normalizer fit_normalizer(const Dataset& train) {
  const std::size_t dim = train.dimension();
  Normalizer norm;
  norm.mean.assign(dim, 0.0);
  norm.scale.assign(dim, 1.0);
  std::vector<double> column(train.size());
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < train.size(); ++i) {
      column[i] = train.features[i][j];
    }
    const MeanVar mv = population_mean_variance(column);
    norm.mean[j] = mv.mean;
    const double sd = std::sqrt(mv.variance);
    norm.scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  return norm;
}

detail::Matrix standardized_matrix(const Dataset& data, const Normalizer& norm) {
  detail::Matrix x(data.size(), data.dimension());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = norm.apply(data.features[i]);
    std::copy(row.begin(), row.end(), x.row(i));
  }
  return x;
}

}  // namespace

TrainedClassifier train_classifier(ModelKind kind, const Dataset& train,
                                   const Hyperparams& hyper, std::uint64_t seed) {
  train.validate();
  hyper.validate();
  if (train.size() == 0) {
    throw ValidationError("empty training set");
  }
  TrainedClassifier model;
  model.kind = kind;
  model.hyper = hyper;
  model.seed = seed;
  model.classes = train.present_classes();
  if (model.classes.size() < 2) {
    throw ValidationError("degenerate training set: fewer than 2 classes");
  }
  model.norm = fit_normalizer(train);
  model.data_fingerprint = fingerprint_dataset(train);

  const detail::Matrix x = standardized_matrix(train, model.norm);
  std::vector<int> y(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto it = std::find(model.classes.begin(), model.classes.end(), train.labels[i]);
    y[i] = static_cast<int>(it - model.classes.begin());
  }
  const int n_classes = static_cast<int>(model.classes.size());

  Rng rng(seed);
  switch (kind) {
    case ModelKind::knn:
      model.impl = detail::train_knn(x, y, n_classes, hyper);
      break;
    case ModelKind::naive_bayes:
      model.impl = detail::train_naive_bayes(x, y, n_classes, hyper);
      break;
    case ModelKind::svm:
      model.impl = detail::train_svm(x, y, n_classes, hyper);
      break;
    case ModelKind::logistic:
      model.impl = detail::train_logistic(x, y, n_classes, hyper);
      break;
    case ModelKind::random_forest:
      model.impl = detail::train_random_forest(x, y, n_classes, hyper, rng);
      break;
    case ModelKind::gbdt:
      model.impl = detail::train_gbdt(x, y, n_classes, hyper);
      break;
  }
  return model;
}

Prediction predict(const TrainedClassifier& model, std::span<const double> fv) {
  if (fv.size() != model.n_features()) {
    throw ValidationError("feature vector length " + std::to_string(fv.size()) +
                          " does not match model dimension " +
                          std::to_string(model.n_features()));
  }
  const std::vector<double> x = model.norm.apply(fv);
  Prediction pred;
  pred.scores = model.impl->class_scores(x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < pred.scores.size(); ++c) {
    if (pred.scores[c] > pred.scores[best]) {
      best = c;  // strict: ties keep the earliest class
    }
  }
  pred.label = model.classes[best];
  return pred;
}

CvReport kfold_cross_validate(const Dataset& dataset, int k, ModelKind kind,
                              const Hyperparams& hyper, std::uint64_t seed) {
  const std::vector<int> fold = stratified_fold_assignment(dataset, k, seed);
  CvReport report;
  report.kind = kind;
  report.k = k;
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      (fold[i] == f ? test_idx : train_idx).push_back(i);
    }
    const Dataset train = dataset.subset(train_idx);
    const Dataset test = dataset.subset(test_idx);
    const TrainedClassifier model =
        train_classifier(kind, train, hyper, seed + static_cast<std::uint64_t>(f) + 1);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (predict(model, test.features[i]).label == test.labels[i]) {
        ++correct;
      }
    }
    report.fold_accuracy.push_back(static_cast<double>(correct) /
                                   static_cast<double>(test.size()));
  }
  const MeanVar mv = population_mean_variance(report.fold_accuracy);
  report.mean_accuracy = mv.mean;
  report.stddev_accuracy = std::sqrt(mv.variance);
  return report;
}

}  // namespace windclime::learn
