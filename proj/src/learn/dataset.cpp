#include <algorithm>
#include <cmath>

#include "windclime/error.hpp"
#include "windclime/learn.hpp"
#include "windclime/rng.hpp"

namespace windclime::learn {

void Dataset::push_row(std::vector<double> fv, Label label, std::string id) {
  features.push_back(std::move(fv));
  labels.push_back(label);
  if (!id.empty() || !ids.empty()) {
    ids.resize(features.size() - 1);
    ids.push_back(std::move(id));
  }
}

void Dataset::validate() const {
  if (features.size() != labels.size()) {
    throw ValidationError("dataset features/labels size mismatch");
  }
  if (!ids.empty() && ids.size() != features.size()) {
    throw ValidationError("dataset ids size mismatch");
  }
  const std::size_t dim = dimension();
  for (const auto& row : features) {
    if (row.size() != dim) {
      throw ValidationError("dataset rows have inconsistent lengths");
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw ValidationError("dataset contains non-finite feature values");
      }
    }
  }
}

std::vector<Label> Dataset::present_classes() const {
  std::vector<Label> classes;
  for (int c = 0; c < features::kLabelCount; ++c) {
    const Label label = static_cast<Label>(c);
    if (std::find(labels.begin(), labels.end(), label) != labels.end()) {
      classes.push_back(label);
    }
  }
  return classes;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.station_id = station_id;
  for (std::size_t i : indices) {
    out.features.push_back(features.at(i));
    out.labels.push_back(labels.at(i));
    if (!ids.empty()) {
      out.ids.push_back(ids.at(i));
    }
  }
  return out;
}

namespace {

std::vector<std::vector<std::size_t>> shuffled_class_indices(const Dataset& dataset,
                                                             Rng& rng) {
  std::vector<std::vector<std::size_t>> by_class(features::kLabelCount);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_class[static_cast<std::size_t>(dataset.labels[i])].push_back(i);
  }
  for (auto& indices : by_class) {
    rng.shuffle(indices);
  }
  return by_class;
}

}  // namespace

std::pair<Dataset, Dataset> stratified_split(const Dataset& dataset, double ratio,
                                             std::uint64_t seed) {
  dataset.validate();
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ConfigError("split ratio must lie in (0, 1)");
  }
  Rng rng(seed);
  std::vector<std::size_t> train_idx, test_idx;
  for (const auto& indices : shuffled_class_indices(dataset, rng)) {
    if (indices.empty()) {
      continue;
    }
    if (indices.size() < 2) {
      throw ValidationError("stratified_split needs >= 2 rows per present class");
    }
    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(ratio * static_cast<double>(indices.size())));
    for (std::size_t i = 0; i < indices.size(); ++i) {
      (i < n_train ? train_idx : test_idx).push_back(indices[i]);
    }
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {dataset.subset(train_idx), dataset.subset(test_idx)};
}

std::vector<int> stratified_fold_assignment(const Dataset& dataset, int k,
                                            std::uint64_t seed) {
  dataset.validate();
  if (k < 2) {
    throw ConfigError("k-fold requires k >= 2");
  }
  if (dataset.size() < static_cast<std::size_t>(k)) {
    throw ValidationError("k-fold requires at least k rows");
  }
  Rng rng(seed);
  std::vector<int> fold(dataset.size(), -1);
  // Continuous round-robin deal across classes keeps overall fold sizes
  // within one of each other, and per-class counts within one as well.
  int cursor = 0;
  for (const auto& indices : shuffled_class_indices(dataset, rng)) {
    for (std::size_t i : indices) {
      fold[i] = cursor;
      cursor = (cursor + 1) % k;
    }
  }
  return fold;
}

}  // namespace windclime::learn
