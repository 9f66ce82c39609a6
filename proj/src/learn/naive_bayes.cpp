#include <algorithm>
#include <cmath>

#include "internal.hpp"

namespace windclime::learn::detail {

namespace {

// Gaussian per-feature likelihoods with MLE (population) variances, floored
// to keep constant features from degenerating.
class NaiveBayesImpl final : public ClassifierImpl {
 public:
  NaiveBayesImpl(std::vector<double> log_prior, Matrix mean, Matrix var)
      : log_prior_(std::move(log_prior)), mean_(std::move(mean)), var_(std::move(var)) {}

  std::vector<double> class_scores(std::span<const double> x) const override {
    const std::size_t n_classes = log_prior_.size();
    std::vector<double> log_post(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
      double lp = log_prior_[c];
      const double* mu = mean_.row(c);
      const double* v = var_.row(c);
      for (std::size_t j = 0; j < mean_.cols; ++j) {
        const double d = x[j] - mu[j];
        lp -= 0.5 * (std::log(2.0 * M_PI * v[j]) + d * d / v[j]);
      }
      log_post[c] = lp;
    }
    const double m = *std::max_element(log_post.begin(), log_post.end());
    double total = 0.0;
    std::vector<double> scores(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
      scores[c] = std::exp(log_post[c] - m);
      total += scores[c];
    }
    for (double& s : scores) {
      s /= total;
    }
    return scores;
  }

  nlohmann::json params_json() const override {
    return {{"log_prior", log_prior_},
            {"n_features", mean_.cols},
            {"mean", mean_.data},
            {"var", var_.data}};
  }

 private:
  std::vector<double> log_prior_;
  Matrix mean_;  // [class][feature]
  Matrix var_;
};

}  // namespace

ImplPtr train_naive_bayes(const Matrix& x, const std::vector<int>& y, int n_classes,
                          const Hyperparams& hp) {
  const std::size_t nc = static_cast<std::size_t>(n_classes);
  std::vector<double> counts(nc, 0.0);
  Matrix mean(nc, x.cols);
  Matrix var(nc, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const std::size_t c = static_cast<std::size_t>(y[i]);
    counts[c] += 1.0;
    const double* row = x.row(i);
    for (std::size_t j = 0; j < x.cols; ++j) {
      mean.row(c)[j] += row[j];
    }
  }
  for (std::size_t c = 0; c < nc; ++c) {
    for (std::size_t j = 0; j < x.cols; ++j) {
      mean.row(c)[j] /= counts[c];
    }
  }
  for (std::size_t i = 0; i < x.rows; ++i) {
    const std::size_t c = static_cast<std::size_t>(y[i]);
    const double* row = x.row(i);
    for (std::size_t j = 0; j < x.cols; ++j) {
      const double d = row[j] - mean.row(c)[j];
      var.row(c)[j] += d * d;
    }
  }
  std::vector<double> log_prior(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    log_prior[c] = std::log(counts[c] / static_cast<double>(x.rows));
    for (std::size_t j = 0; j < x.cols; ++j) {
      var.row(c)[j] = std::max(var.row(c)[j] / counts[c], hp.nb_var_floor);
    }
  }
  return std::make_shared<NaiveBayesImpl>(std::move(log_prior), std::move(mean),
                                          std::move(var));
}

ImplPtr naive_bayes_from_json(const nlohmann::json& j) {
  const auto log_prior = j.at("log_prior").get<std::vector<double>>();
  Matrix mean, var;
  mean.rows = var.rows = log_prior.size();
  mean.cols = var.cols = j.at("n_features").get<std::size_t>();
  mean.data = j.at("mean").get<std::vector<double>>();
  var.data = j.at("var").get<std::vector<double>>();
  return std::make_shared<NaiveBayesImpl>(log_prior, std::move(mean), std::move(var));
}

}  // namespace windclime::learn::detail
