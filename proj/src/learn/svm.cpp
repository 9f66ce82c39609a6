#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "windclime/error.hpp"

namespace windclime::learn::detail {

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

struct BinarySvm {
  Matrix support_vectors;
  std::vector<double> coef;  // alpha_i * y_i per support vector
  double bias = 0.0;

  double margin(std::span<const double> x, double gamma) const {
    double f = bias;
    for (std::size_t i = 0; i < support_vectors.rows; ++i) {
      const double* sv = support_vectors.row(i);
      double d2 = 0.0;
      for (std::size_t j = 0; j < support_vectors.cols; ++j) {
        const double d = x[j] - sv[j];
        d2 += d * d;
      }
      f += coef[i] * std::exp(-gamma * d2);
    }
    return f;
  }
};

/**
 * Sequential minimal optimization for the soft-margin RBF SVM: repeatedly
 * picks a KKT-violating pair, solves the two-variable subproblem in closed
 * form, and refreshes the error cache, until a full sweep finds no violation
 * at the requested tolerance.
 */
class SmoSolver {
 public:
  SmoSolver(const Matrix& kernel, const std::vector<int>& y, double c, double tol)
      : kernel_(kernel),
        y_(y),
        c_(c),
        tol_(tol),
        n_(y.size()),
        alpha_(y.size(), 0.0),
        error_(y.size()) {
    for (std::size_t i = 0; i < n_; ++i) {
      error_[i] = -y_[i];  // f(x) starts at 0
    }
  }

  void solve() {
    std::size_t num_changed = 0;
    bool examine_all = true;
    std::size_t sweeps = 0;
    const std::size_t max_sweeps = 200 * n_ + 10000;
    while (num_changed > 0 || examine_all) {
      if (++sweeps > max_sweeps) {
        throw NumericError("SMO did not converge within the sweep budget");
      }
      num_changed = 0;
      for (std::size_t i = 0; i < n_; ++i) {
        if (examine_all || is_free(alpha_[i])) {
          num_changed += examine(i);
        }
      }
      if (examine_all) {
        examine_all = false;
      } else if (num_changed == 0) {
        examine_all = true;
      }
    }
  }

  const std::vector<double>& alpha() const { return alpha_; }
  double bias() const { return bias_; }

 private:
  bool is_free(double a) const { return a > 0.0 && a < c_; }

  std::size_t examine(std::size_t i2) {
    const double y2 = y_[i2];
    const double alph2 = alpha_[i2];
    const double e2 = error_[i2];
    const double r2 = e2 * y2;
    const bool violates = (r2 < -tol_ && alph2 < c_) || (r2 > tol_ && alph2 > 0.0);
    if (!violates) {
      return 0;
    }
    // Second-choice heuristic: the free point with the largest |E1 - E2|.
    std::size_t best = n_;
    double best_gap = -1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (i != i2 && is_free(alpha_[i])) {
        const double gap = std::fabs(error_[i] - e2);
        if (gap > best_gap) {
          best_gap = gap;
          best = i;
        }
      }
    }
    if (best < n_ && take_step(best, i2)) {
      return 1;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if (i != i2 && is_free(alpha_[i]) && take_step(i, i2)) {
        return 1;
      }
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if (i != i2 && take_step(i, i2)) {
        return 1;
      }
    }
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) {
      return false;
    }
    const double alph1 = alpha_[i1];
    const double alph2 = alpha_[i2];
    const double y1 = y_[i1];
    const double y2 = y_[i2];
    const double e1 = error_[i1];
    const double e2 = error_[i2];
    const double s = y1 * y2;

    double lo, hi;
    if (s < 0.0) {
      lo = std::max(0.0, alph2 - alph1);
      hi = std::min(c_, c_ + alph2 - alph1);
    } else {
      lo = std::max(0.0, alph1 + alph2 - c_);
      hi = std::min(c_, alph1 + alph2);
    }
    if (lo >= hi) {
      return false;
    }
    const double k11 = kernel_.row(i1)[i1];
    const double k12 = kernel_.row(i1)[i2];
    const double k22 = kernel_.row(i2)[i2];
    const double eta = k11 + k22 - 2.0 * k12;

    double a2;
    if (eta > 0.0) {
      a2 = std::clamp(alph2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // Degenerate curvature (duplicate points): evaluate the objective at
      // both clip bounds.
      const double f1 = y1 * (e1 - bias_) - alph1 * k11 - s * alph2 * k12;
      const double f2 = y2 * (e2 - bias_) - alph2 * k22 - s * alph1 * k12;
      const double l1 = alph1 + s * (alph2 - lo);
      const double h1 = alph1 + s * (alph2 - hi);
      const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                            s * lo * l1 * k12;
      const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                            s * hi * h1 * k12;
      if (obj_lo < obj_hi - 1e-12) {
        a2 = lo;
      } else if (obj_hi < obj_lo - 1e-12) {
        a2 = hi;
      } else {
        return false;
      }
    }
    if (std::fabs(a2 - alph2) < 1e-10 * (a2 + alph2 + 1e-10)) {
      return false;
    }
    const double a1 = alph1 + s * (alph2 - a2);

    const double d1 = y1 * (a1 - alph1);
    const double d2 = y2 * (a2 - alph2);
    const double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
    double new_bias;
    if (a1 > 0.0 && a1 < c_) {
      new_bias = b1;
    } else if (a2 > 0.0 && a2 < c_) {
      new_bias = b2;
    } else {
      new_bias = 0.5 * (b1 + b2);
    }
    const double db = new_bias - bias_;
    for (std::size_t j = 0; j < n_; ++j) {
      error_[j] += d1 * kernel_.row(i1)[j] + d2 * kernel_.row(i2)[j] + db;
    }
    alpha_[i1] = a1;
    alpha_[i2] = a2;
    bias_ = new_bias;
    error_[i1] = margin_residual(i1);
    error_[i2] = margin_residual(i2);
    return true;
  }

  double margin_residual(std::size_t i) const {
    double f = bias_;
    for (std::size_t j = 0; j < n_; ++j) {
      if (alpha_[j] != 0.0) {
        f += alpha_[j] * y_[j] * kernel_.row(i)[j];
      }
    }
    return f - y_[i];
  }

  const Matrix& kernel_;
  std::vector<int> y_;
  double c_;
  double tol_;
  std::size_t n_;
  std::vector<double> alpha_;
  std::vector<double> error_;
  double bias_ = 0.0;
};

class SvmImpl final : public ClassifierImpl {
 public:
  SvmImpl(std::vector<BinarySvm> per_class, double gamma)
      : per_class_(std::move(per_class)), gamma_(gamma) {}

  std::vector<double> class_scores(std::span<const double> x) const override {
    std::vector<double> scores(per_class_.size());
    double total = 0.0;
    for (std::size_t c = 0; c < per_class_.size(); ++c) {
      scores[c] = sigmoid(per_class_[c].margin(x, gamma_));
      total += scores[c];
    }
    for (double& s : scores) {
      s /= total;
    }
    return scores;
  }

  nlohmann::json params_json() const override {
    nlohmann::json classes = nlohmann::json::array();
    for (const BinarySvm& svm : per_class_) {
      classes.push_back({{"rows", svm.support_vectors.rows},
                         {"cols", svm.support_vectors.cols},
                         {"sv", svm.support_vectors.data},
                         {"coef", svm.coef},
                         {"bias", svm.bias}});
    }
    return {{"gamma", gamma_}, {"ovr", std::move(classes)}};
  }

 private:
  std::vector<BinarySvm> per_class_;  // one-vs-rest, in class order
  double gamma_;
};

}  // namespace

ImplPtr train_svm(const Matrix& x, const std::vector<int>& y, int n_classes,
                  const Hyperparams& hp) {
  const double gamma = hp.svm_gamma > 0.0 ? hp.svm_gamma : 1.0 / static_cast<double>(x.cols);
  // One kernel matrix serves every one-vs-rest subproblem.
  Matrix kernel(x.rows, x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    kernel.row(i)[i] = 1.0;
    for (std::size_t j = i + 1; j < x.rows; ++j) {
      const double* a = x.row(i);
      const double* b = x.row(j);
      double d2 = 0.0;
      for (std::size_t f = 0; f < x.cols; ++f) {
        const double d = a[f] - b[f];
        d2 += d * d;
      }
      const double k = std::exp(-gamma * d2);
      kernel.row(i)[j] = k;
      kernel.row(j)[i] = k;
    }
  }

  std::vector<BinarySvm> per_class;
  per_class.reserve(static_cast<std::size_t>(n_classes));
  for (int c = 0; c < n_classes; ++c) {
    std::vector<int> target(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
      target[i] = y[i] == c ? 1 : -1;
    }
    SmoSolver solver(kernel, target, hp.svm_c, hp.svm_tol);
    solver.solve();

    BinarySvm svm;
    svm.bias = solver.bias();
    std::vector<std::size_t> sv_rows;
    for (std::size_t i = 0; i < x.rows; ++i) {
      if (solver.alpha()[i] > 0.0) {
        sv_rows.push_back(i);
      }
    }
    svm.support_vectors = Matrix(sv_rows.size(), x.cols);
    svm.coef.resize(sv_rows.size());
    for (std::size_t r = 0; r < sv_rows.size(); ++r) {
      const std::size_t i = sv_rows[r];
      std::copy(x.row(i), x.row(i) + x.cols, svm.support_vectors.row(r));
      svm.coef[r] = solver.alpha()[i] * target[i];
    }
    per_class.push_back(std::move(svm));
  }
  return std::make_shared<SvmImpl>(std::move(per_class), gamma);
}

ImplPtr svm_from_json(const nlohmann::json& j) {
  std::vector<BinarySvm> per_class;
  for (const auto& cj : j.at("ovr")) {
    BinarySvm svm;
    svm.support_vectors.rows = cj.at("rows").get<std::size_t>();
    svm.support_vectors.cols = cj.at("cols").get<std::size_t>();
    svm.support_vectors.data = cj.at("sv").get<std::vector<double>>();
    svm.coef = cj.at("coef").get<std::vector<double>>();
    svm.bias = cj.at("bias").get<double>();
    per_class.push_back(std::move(svm));
  }
  return std::make_shared<SvmImpl>(std::move(per_class), j.at("gamma").get<double>());
}

}  // namespace windclime::learn::detail
