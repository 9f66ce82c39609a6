#include <algorithm>
#include <cmath>
#include <numeric>

#include "internal.hpp"
#include "windclime/error.hpp"

namespace windclime::learn::detail {

const TreeNode& Tree::leaf_for(std::span<const double> x) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& n = nodes[static_cast<std::size_t>(node)];
    node = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(node)];
}

nlohmann::json Tree::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const TreeNode& n : nodes) {
    arr.push_back({{"f", n.feature},
                   {"t", n.threshold},
                   {"l", n.left},
                   {"r", n.right},
                   {"v", n.value}});
  }
  return arr;
}

Tree Tree::from_json(const nlohmann::json& j) {
  Tree tree;
  for (const auto& nj : j) {
    TreeNode n;
    n.feature = nj.at("f").get<int>();
    n.threshold = nj.at("t").get<double>();
    n.left = nj.at("l").get<int>();
    n.right = nj.at("r").get<int>();
    n.value = nj.at("v").get<std::vector<double>>();
    tree.nodes.push_back(std::move(n));
  }
  return tree;
}

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // impurity decrease / SSE gain; > 0 when usable
};

// Best Gini split on one feature; samples sorted by caller.
SplitChoice best_gini_split(const std::vector<std::pair<double, int>>& sorted,
                            std::span<const double> total_counts, double parent_gini,
                            int n_classes) {
  const double n = static_cast<double>(sorted.size());
  std::vector<double> left_counts(static_cast<std::size_t>(n_classes), 0.0);
  SplitChoice best;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    left_counts[static_cast<std::size_t>(sorted[i].second)] += 1.0;
    if (sorted[i].first == sorted[i + 1].first) {
      continue;  // no threshold separates equal values
    }
    const double nl = static_cast<double>(i + 1);
    const double nr = n - nl;
    double gl = 1.0, gr = 1.0;
    for (int c = 0; c < n_classes; ++c) {
      const double l = left_counts[static_cast<std::size_t>(c)] / nl;
      const double r =
          (total_counts[static_cast<std::size_t>(c)] - left_counts[static_cast<std::size_t>(c)]) / nr;
      gl -= l * l;
      gr -= r * r;
    }
    const double gain = parent_gini - (nl * gl + nr * gr) / n;
    if (gain > best.score + 1e-15) {
      best.score = gain;
      best.feature = 0;  // set by caller
      best.threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
    }
  }
  return best;
}

}  // namespace

Tree grow_classification_tree(const Matrix& x, const std::vector<int>& y,
                              std::span<const std::size_t> sample_indices,
                              int n_classes, int max_features, Rng* rng) {
  Tree tree;
  struct Pending {
    std::vector<std::size_t> samples;
    int node = 0;
  };
  std::vector<Pending> stack;
  tree.nodes.emplace_back();
  stack.push_back({{sample_indices.begin(), sample_indices.end()}, 0});

  std::vector<std::size_t> all_features(x.cols);
  std::iota(all_features.begin(), all_features.end(), 0);

  while (!stack.empty()) {
    Pending job = std::move(stack.back());
    stack.pop_back();

    std::vector<double> counts(static_cast<std::size_t>(n_classes), 0.0);
    for (std::size_t i : job.samples) {
      counts[static_cast<std::size_t>(y[i])] += 1.0;
    }
    const double n = static_cast<double>(job.samples.size());
    double gini = 1.0;
    for (double c : counts) {
      gini -= (c / n) * (c / n);
    }

    auto make_leaf = [&]() {
      std::vector<double> dist(counts);
      for (double& c : dist) {
        c /= n;
      }
      tree.nodes[static_cast<std::size_t>(job.node)].value = std::move(dist);
    };

    if (gini <= 0.0 || job.samples.size() < 2) {
      make_leaf();
      continue;
    }

    // Candidate features: a fresh random subset per split when subsampling.
    std::span<const std::size_t> candidates(all_features);
    std::vector<std::size_t> sampled;
    if (max_features > 0 && static_cast<std::size_t>(max_features) < x.cols) {
      sampled = all_features;
      for (int f = 0; f < max_features; ++f) {
        const std::size_t pick = f + rng->below(sampled.size() - static_cast<std::size_t>(f));
        std::swap(sampled[static_cast<std::size_t>(f)], sampled[pick]);
      }
      sampled.resize(static_cast<std::size_t>(max_features));
      candidates = sampled;
    }

    SplitChoice best;
    std::vector<std::pair<double, int>> sorted(job.samples.size());
    for (std::size_t feature : candidates) {
      for (std::size_t i = 0; i < job.samples.size(); ++i) {
        sorted[i] = {x.row(job.samples[i])[feature], y[job.samples[i]]};
      }
      std::sort(sorted.begin(), sorted.end());
      SplitChoice choice = best_gini_split(sorted, counts, gini, n_classes);
      if (choice.feature >= 0 && choice.score > best.score) {
        best = choice;
        best.feature = static_cast<int>(feature);
      }
    }
    if (best.feature < 0) {
      make_leaf();
      continue;
    }

    std::vector<std::size_t> left, right;
    for (std::size_t i : job.samples) {
      (x.row(i)[static_cast<std::size_t>(best.feature)] <= best.threshold ? left : right)
          .push_back(i);
    }
    const int left_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const int right_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[static_cast<std::size_t>(job.node)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left_id;
    node.right = right_id;
    stack.push_back({std::move(left), left_id});
    stack.push_back({std::move(right), right_id});
  }
  return tree;
}

GrownRegressionTree grow_regression_tree(const Matrix& x, std::span<const double> target,
                                         std::span<const std::size_t> sample_indices,
                                         int max_depth) {
  GrownRegressionTree grown;
  struct Pending {
    std::vector<std::size_t> samples;
    int node = 0;
    int depth = 0;
  };
  std::vector<Pending> stack;
  grown.tree.nodes.emplace_back();
  stack.push_back({{sample_indices.begin(), sample_indices.end()}, 0, 0});

  while (!stack.empty()) {
    Pending job = std::move(stack.back());
    stack.pop_back();

    double sum = 0.0;
    for (std::size_t i : job.samples) {
      sum += target[i];
    }
    const double n = static_cast<double>(job.samples.size());
    const double mean = sum / n;

    auto make_leaf = [&]() {
      grown.tree.nodes[static_cast<std::size_t>(job.node)].value = {mean};
      grown.leaf_ids.push_back(job.node);
      grown.leaf_samples.push_back(std::move(job.samples));
    };

    if (job.depth >= max_depth || job.samples.size() < 2) {
      make_leaf();
      continue;
    }

    // Maximize sum-of-squares reduction: parent SSE minus children SSE,
    // which is equivalent to maximizing nl*ml^2 + nr*mr^2.
    SplitChoice best;
    std::vector<std::pair<double, double>> sorted(job.samples.size());
    const double base = sum * sum / n;
    for (std::size_t feature = 0; feature < x.cols; ++feature) {
      for (std::size_t i = 0; i < job.samples.size(); ++i) {
        sorted[i] = {x.row(job.samples[i])[feature], target[job.samples[i]]};
      }
      std::sort(sorted.begin(), sorted.end());
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        left_sum += sorted[i].second;
        if (sorted[i].first == sorted[i + 1].first) {
          continue;
        }
        const double nl = static_cast<double>(i + 1);
        const double nr = n - nl;
        const double right_sum = sum - left_sum;
        const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - base;
        if (gain > best.score + 1e-15) {
          best.score = gain;
          best.feature = static_cast<int>(feature);
          best.threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
        }
      }
    }
    if (best.feature < 0) {
      make_leaf();
      continue;
    }

    std::vector<std::size_t> left, right;
    for (std::size_t i : job.samples) {
      (x.row(i)[static_cast<std::size_t>(best.feature)] <= best.threshold ? left : right)
          .push_back(i);
    }
    const int left_id = static_cast<int>(grown.tree.nodes.size());
    grown.tree.nodes.emplace_back();
    const int right_id = static_cast<int>(grown.tree.nodes.size());
    grown.tree.nodes.emplace_back();
    TreeNode& node = grown.tree.nodes[static_cast<std::size_t>(job.node)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = left_id;
    node.right = right_id;
    stack.push_back({std::move(left), left_id, job.depth + 1});
    stack.push_back({std::move(right), right_id, job.depth + 1});
  }
  return grown;
}

namespace {

class RandomForestImpl final : public ClassifierImpl {
 public:
  RandomForestImpl(std::vector<Tree> trees, int n_classes)
      : trees_(std::move(trees)), n_classes_(n_classes) {}

  std::vector<double> class_scores(std::span<const double> x) const override {
    std::vector<double> scores(static_cast<std::size_t>(n_classes_), 0.0);
    for (const Tree& tree : trees_) {
      const std::vector<double>& dist = tree.leaf_for(x).value;
      for (std::size_t c = 0; c < scores.size(); ++c) {
        scores[c] += dist[c];
      }
    }
    for (double& s : scores) {
      s /= static_cast<double>(trees_.size());
    }
    return scores;
  }

  nlohmann::json params_json() const override {
    nlohmann::json trees = nlohmann::json::array();
    for (const Tree& tree : trees_) {
      trees.push_back(tree.to_json());
    }
    return {{"n_classes", n_classes_}, {"trees", std::move(trees)}};
  }

 private:
  std::vector<Tree> trees_;
  int n_classes_;
};

class GbdtImpl final : public ClassifierImpl {
 public:
  GbdtImpl(std::vector<double> init_raw, std::vector<std::vector<Tree>> rounds,
           double learning_rate)
      : init_raw_(std::move(init_raw)),
        rounds_(std::move(rounds)),
        learning_rate_(learning_rate) {}

  std::vector<double> class_scores(std::span<const double> x) const override {
    std::vector<double> raw(init_raw_);
    for (const auto& round : rounds_) {
      for (std::size_t c = 0; c < raw.size(); ++c) {
        raw[c] += learning_rate_ * round[c].leaf_for(x).value[0];
      }
    }
    const double m = *std::max_element(raw.begin(), raw.end());
    double total = 0.0;
    for (double& r : raw) {
      r = std::exp(r - m);
      total += r;
    }
    for (double& r : raw) {
      r /= total;
    }
    return raw;
  }

  nlohmann::json params_json() const override {
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& round : rounds_) {
      nlohmann::json per_class = nlohmann::json::array();
      for (const Tree& tree : round) {
        per_class.push_back(tree.to_json());
      }
      rounds.push_back(std::move(per_class));
    }
    return {{"init_raw", init_raw_},
            {"learning_rate", learning_rate_},
            {"rounds", std::move(rounds)}};
  }

 private:
  std::vector<double> init_raw_;            // log class priors
  std::vector<std::vector<Tree>> rounds_;   // [round][class]
  double learning_rate_;
};

}  // namespace

ImplPtr train_random_forest(const Matrix& x, const std::vector<int>& y, int n_classes,
                            const Hyperparams& hp, Rng& rng) {
  const int max_features =
      std::max(1, static_cast<int>(std::sqrt(static_cast<double>(x.cols))));
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(hp.rf_trees));
  std::vector<std::size_t> bootstrap(x.rows);
  for (int t = 0; t < hp.rf_trees; ++t) {
    for (std::size_t i = 0; i < x.rows; ++i) {
      bootstrap[i] = rng.below(x.rows);
    }
    trees.push_back(grow_classification_tree(x, y, bootstrap, n_classes, max_features, &rng));
  }
  return std::make_shared<RandomForestImpl>(std::move(trees), n_classes);
}

ImplPtr train_gbdt(const Matrix& x, const std::vector<int>& y, int n_classes,
                   const Hyperparams& hp) {
  const std::size_t n = x.rows;
  const std::size_t nc = static_cast<std::size_t>(n_classes);

  std::vector<double> init_raw(nc, 0.0);
  for (int label : y) {
    init_raw[static_cast<std::size_t>(label)] += 1.0;
  }
  for (double& v : init_raw) {
    v = std::log(std::max(v, 1.0) / static_cast<double>(n));
  }

  std::vector<std::vector<double>> raw(nc, std::vector<double>(n));
  for (std::size_t c = 0; c < nc; ++c) {
    raw[c].assign(n, init_raw[c]);
  }
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);

  std::vector<std::vector<Tree>> rounds;
  rounds.reserve(static_cast<std::size_t>(hp.gbdt_rounds));
  std::vector<double> prob(n), residual(n);
  const double k_factor = nc > 1 ? static_cast<double>(nc - 1) / static_cast<double>(nc) : 1.0;

  for (int round = 0; round < hp.gbdt_rounds; ++round) {
    std::vector<Tree> per_class;
    per_class.reserve(nc);
    // Softmax probabilities under the current raw scores.
    std::vector<std::vector<double>> p(nc, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      double m = raw[0][i];
      for (std::size_t c = 1; c < nc; ++c) {
        m = std::max(m, raw[c][i]);
      }
      double total = 0.0;
      for (std::size_t c = 0; c < nc; ++c) {
        p[c][i] = std::exp(raw[c][i] - m);
        total += p[c][i];
      }
      for (std::size_t c = 0; c < nc; ++c) {
        p[c][i] /= total;
      }
    }
    for (std::size_t c = 0; c < nc; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        residual[i] = (static_cast<std::size_t>(y[i]) == c ? 1.0 : 0.0) - p[c][i];
      }
      GrownRegressionTree grown = grow_regression_tree(x, residual, all, hp.gbdt_depth);
      // Newton leaf values for the multinomial deviance.
      for (std::size_t leaf = 0; leaf < grown.leaf_ids.size(); ++leaf) {
        double num = 0.0, den = 0.0;
        for (std::size_t i : grown.leaf_samples[leaf]) {
          num += residual[i];
          den += std::fabs(residual[i]) * (1.0 - std::fabs(residual[i]));
        }
        const double gamma = den > 1e-12 ? k_factor * num / den : 0.0;
        grown.tree.nodes[static_cast<std::size_t>(grown.leaf_ids[leaf])].value = {gamma};
      }
      for (std::size_t i = 0; i < n; ++i) {
        raw[c][i] += hp.gbdt_learning_rate * grown.tree.leaf_for(x.row_span(i)).value[0];
      }
      per_class.push_back(std::move(grown.tree));
    }
    rounds.push_back(std::move(per_class));
  }
  return std::make_shared<GbdtImpl>(std::move(init_raw), std::move(rounds),
                                    hp.gbdt_learning_rate);
}

ImplPtr random_forest_from_json(const nlohmann::json& j) {
  std::vector<Tree> trees;
  for (const auto& tj : j.at("trees")) {
    trees.push_back(Tree::from_json(tj));
  }
  return std::make_shared<RandomForestImpl>(std::move(trees), j.at("n_classes").get<int>());
}

ImplPtr gbdt_from_json(const nlohmann::json& j) {
  std::vector<std::vector<Tree>> rounds;
  for (const auto& rj : j.at("rounds")) {
    std::vector<Tree> per_class;
    for (const auto& tj : rj) {
      per_class.push_back(Tree::from_json(tj));
    }
    rounds.push_back(std::move(per_class));
  }
  return std::make_shared<GbdtImpl>(j.at("init_raw").get<std::vector<double>>(),
                                    std::move(rounds), j.at("learning_rate").get<double>());
}

}  // namespace windclime::learn::detail
