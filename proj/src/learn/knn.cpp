#include <algorithm>
#include <cmath>

#include "internal.hpp"

namespace windclime::learn::detail {

namespace {

class KnnImpl final : public ClassifierImpl {
 public:
  KnnImpl(Matrix x, std::vector<int> y, int n_classes, int k)
      : x_(std::move(x)), y_(std::move(y)), n_classes_(n_classes), k_(k) {}

  std::vector<double> class_scores(std::span<const double> q) const override {
    // Neighbor order is (squared distance, training index); the index
    // tie-break keeps predictions reproducible on duplicate points.
    std::vector<std::pair<double, std::size_t>> dist(x_.rows);
    for (std::size_t i = 0; i < x_.rows; ++i) {
      const double* row = x_.row(i);
      double d2 = 0.0;
      for (std::size_t j = 0; j < x_.cols; ++j) {
        const double d = q[j] - row[j];
        d2 += d * d;
      }
      dist[i] = {d2, i};
    }
    const std::size_t k_eff = std::min<std::size_t>(static_cast<std::size_t>(k_), x_.rows);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_eff),
                      dist.end());
    std::vector<double> scores(static_cast<std::size_t>(n_classes_), 0.0);
    for (std::size_t i = 0; i < k_eff; ++i) {
      scores[static_cast<std::size_t>(y_[dist[i].second])] += 1.0;
    }
    for (double& s : scores) {
      s /= static_cast<double>(k_eff);
    }
    return scores;
  }

  nlohmann::json params_json() const override {
    return {{"k", k_},
            {"n_classes", n_classes_},
            {"rows", x_.rows},
            {"cols", x_.cols},
            {"x", x_.data},
            {"y", y_}};
  }

 private:
  Matrix x_;
  std::vector<int> y_;
  int n_classes_;
  int k_;
};

}  // namespace

ImplPtr train_knn(const Matrix& x, const std::vector<int>& y, int n_classes,
                  const Hyperparams& hp) {
  return std::make_shared<KnnImpl>(x, y, n_classes, hp.knn_k);
}

ImplPtr knn_from_json(const nlohmann::json& j) {
  Matrix x;
  x.rows = j.at("rows").get<std::size_t>();
  x.cols = j.at("cols").get<std::size_t>();
  x.data = j.at("x").get<std::vector<double>>();
  return std::make_shared<KnnImpl>(std::move(x), j.at("y").get<std::vector<int>>(),
                                   j.at("n_classes").get<int>(), j.at("k").get<int>());
}

}  // namespace windclime::learn::detail
