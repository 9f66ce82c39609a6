#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "windclime/error.hpp"

namespace windclime::learn::detail {

namespace {

// Dense Cholesky solve of an SPD system, in place.
std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b,
                                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) {
        sum -= a[i * n + k] * a[j * n + k];
      }
      if (i == j) {
        if (sum <= 0.0) {
          throw NumericError("logistic Newton system is not positive definite");
        }
        a[i * n + i] = std::sqrt(sum);
      } else {
        a[i * n + j] = sum / a[j * n + j];
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double sum = b[i];
    for (std::size_t k = 0; k < i; ++k) {
      sum -= a[i * n + k] * b[k];
    }
    b[i] = sum / a[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double sum = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) {
      sum -= a[k * n + ii] * b[k];
    }
    b[ii] = sum / a[ii * n + ii];
  }
  return b;
}

double log1p_exp(double z) {
  // log(1 + e^z) without overflow.
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

struct BinaryLogit {
  std::vector<double> weights;
  double bias = 0.0;
};

/**
 * One-vs-rest binary fit of min_w sum_i log(1 + exp(-y_i (w.x_i + b)))
 * + l2/2 ||w||^2 (bias unpenalized), by damped Newton iterations until the
 * gradient norm drops under `tol`.
 */
BinaryLogit fit_binary_logistic(const Matrix& x, const std::vector<int>& target,
                                double l2, double tol) {
  const std::size_t d = x.cols;
  const std::size_t dim = d + 1;  // weights then bias
  std::vector<double> theta(dim, 0.0);
  std::vector<double> z(x.rows);

  auto objective = [&](const std::vector<double>& th) {
    double obj = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      const double* row = x.row(i);
      double zi = th[d];
      for (std::size_t j = 0; j < d; ++j) {
        zi += th[j] * row[j];
      }
      obj += log1p_exp(-target[i] * zi);
    }
    for (std::size_t j = 0; j < d; ++j) {
      obj += 0.5 * l2 * th[j] * th[j];
    }
    return obj;
  };

  constexpr int kMaxIter = 200;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    for (std::size_t i = 0; i < x.rows; ++i) {
      const double* row = x.row(i);
      double zi = theta[d];
      for (std::size_t j = 0; j < d; ++j) {
        zi += theta[j] * row[j];
      }
      z[i] = zi;
    }
    std::vector<double> grad(dim, 0.0);
    std::vector<double> hess(dim * dim, 0.0);
    for (std::size_t i = 0; i < x.rows; ++i) {
      const double p = sigmoid(z[i]);  // P(y = +1 | x)
      const double yi01 = target[i] > 0 ? 1.0 : 0.0;
      const double g = p - yi01;
      const double w = std::max(p * (1.0 - p), 1e-12);
      const double* row = x.row(i);
      for (std::size_t j = 0; j < d; ++j) {
        grad[j] += g * row[j];
        for (std::size_t k = 0; k <= j; ++k) {
          hess[j * dim + k] += w * row[j] * row[k];
        }
        hess[d * dim + j] += w * row[j];
      }
      grad[d] += g;
      hess[d * dim + d] += w;
    }
    for (std::size_t j = 0; j < d; ++j) {
      grad[j] += l2 * theta[j];
      hess[j * dim + j] += l2;
    }
    hess[d * dim + d] += 1e-12;
    for (std::size_t j = 0; j < dim; ++j) {
      for (std::size_t k = j + 1; k < dim; ++k) {
        hess[j * dim + k] = hess[k * dim + j];
      }
    }

    double grad_norm = 0.0;
    for (double g : grad) {
      grad_norm += g * g;
    }
    grad_norm = std::sqrt(grad_norm);
    if (grad_norm < tol) {
      BinaryLogit fit;
      fit.weights.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(d));
      fit.bias = theta[d];
      return fit;
    }

    const std::vector<double> step = cholesky_solve(std::move(hess), grad, dim);
    const double f0 = objective(theta);
    double scale = 1.0;
    std::vector<double> trial(dim);
    for (int back = 0; back < 60; ++back) {
      for (std::size_t j = 0; j < dim; ++j) {
        trial[j] = theta[j] - scale * step[j];
      }
      if (objective(trial) <= f0) {
        break;
      }
      scale *= 0.5;
    }
    theta = trial;
  }
  throw NumericError("logistic regression did not reach the gradient tolerance");
}

class LogisticImpl final : public ClassifierImpl {
 public:
  explicit LogisticImpl(std::vector<BinaryLogit> per_class)
      : per_class_(std::move(per_class)) {}

  std::vector<double> class_scores(std::span<const double> x) const override {
    std::vector<double> scores(per_class_.size());
    double total = 0.0;
    for (std::size_t c = 0; c < per_class_.size(); ++c) {
      double z = per_class_[c].bias;
      for (std::size_t j = 0; j < x.size(); ++j) {
        z += per_class_[c].weights[j] * x[j];
      }
      scores[c] = sigmoid(z);
      total += scores[c];
    }
    for (double& s : scores) {
      s /= total;
    }
    return scores;
  }

  nlohmann::json params_json() const override {
    nlohmann::json classes = nlohmann::json::array();
    for (const BinaryLogit& fit : per_class_) {
      classes.push_back({{"w", fit.weights}, {"b", fit.bias}});
    }
    return {{"ovr", std::move(classes)}};
  }

 private:
  std::vector<BinaryLogit> per_class_;
};

}  // namespace

ImplPtr train_logistic(const Matrix& x, const std::vector<int>& y, int n_classes,
                       const Hyperparams& hp) {
  std::vector<BinaryLogit> per_class;
  per_class.reserve(static_cast<std::size_t>(n_classes));
  for (int c = 0; c < n_classes; ++c) {
    std::vector<int> target(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
      target[i] = y[i] == c ? 1 : -1;
    }
    per_class.push_back(fit_binary_logistic(x, target, hp.lr_l2, hp.lr_tol));
  }
  return std::make_shared<LogisticImpl>(std::move(per_class));
}

ImplPtr logistic_from_json(const nlohmann::json& j) {
  std::vector<BinaryLogit> per_class;
  for (const auto& cj : j.at("ovr")) {
    BinaryLogit fit;
    fit.weights = cj.at("w").get<std::vector<double>>();
    fit.bias = cj.at("b").get<double>();
    per_class.push_back(std::move(fit));
  }
  return std::make_shared<LogisticImpl>(std::move(per_class));
}

}  // namespace windclime::learn::detail
