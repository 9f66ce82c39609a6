#include <cstring>
#include <istream>
#include <ostream>

#include "internal.hpp"
#include "windclime/error.hpp"

namespace windclime::learn {

namespace {

constexpr const char* kFormatName = "windclime-model";
constexpr int kFormatVersion = 1;

std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t h = 14695981039346656037ULL) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string hash_json(const nlohmann::json& j) {
  const std::string dump = j.dump();
  return hex64(fnv1a({reinterpret_cast<const unsigned char*>(dump.data()), dump.size()}));
}

nlohmann::json hyper_to_json(const Hyperparams& hp) {
  return {{"knn_k", hp.knn_k},
          {"nb_var_floor", hp.nb_var_floor},
          {"svm_c", hp.svm_c},
          {"svm_gamma", hp.svm_gamma},
          {"svm_tol", hp.svm_tol},
          {"lr_l2", hp.lr_l2},
          {"lr_tol", hp.lr_tol},
          {"rf_trees", hp.rf_trees},
          {"gbdt_rounds", hp.gbdt_rounds},
          {"gbdt_depth", hp.gbdt_depth},
          {"gbdt_learning_rate", hp.gbdt_learning_rate}};
}

Hyperparams hyper_from_json(const nlohmann::json& j) {
  Hyperparams hp;
  hp.knn_k = j.at("knn_k").get<int>();
  hp.nb_var_floor = j.at("nb_var_floor").get<double>();
  hp.svm_c = j.at("svm_c").get<double>();
  hp.svm_gamma = j.at("svm_gamma").get<double>();
  hp.svm_tol = j.at("svm_tol").get<double>();
  hp.lr_l2 = j.at("lr_l2").get<double>();
  hp.lr_tol = j.at("lr_tol").get<double>();
  hp.rf_trees = j.at("rf_trees").get<int>();
  hp.gbdt_rounds = j.at("gbdt_rounds").get<int>();
  hp.gbdt_depth = j.at("gbdt_depth").get<int>();
  hp.gbdt_learning_rate = j.at("gbdt_learning_rate").get<double>();
  return hp;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::knn: return "knn";
    case ModelKind::naive_bayes: return "nb";
    case ModelKind::svm: return "svm";
    case ModelKind::gbdt: return "gbdt";
    case ModelKind::random_forest: return "rf";
    case ModelKind::logistic: return "lr";
  }
  throw ValidationError("invalid model kind");
}

ModelKind parse_model_kind(const std::string& text) {
  if (text == "knn") return ModelKind::knn;
  if (text == "nb" || text == "naive-bayes") return ModelKind::naive_bayes;
  if (text == "svm") return ModelKind::svm;
  if (text == "gbdt") return ModelKind::gbdt;
  if (text == "rf" || text == "random-forest") return ModelKind::random_forest;
  if (text == "lr" || text == "logistic") return ModelKind::logistic;
  throw ParseError("unknown model kind '" + text + "'");
}

std::string fingerprint_dataset(const Dataset& dataset) {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](const void* p, std::size_t size) {
    h = fnv1a({static_cast<const unsigned char*>(p), size}, h);
  };
  const std::uint64_t rows = dataset.size();
  const std::uint64_t cols = dataset.dimension();
  mix(&rows, sizeof(rows));
  mix(&cols, sizeof(cols));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    mix(dataset.features[i].data(), cols * sizeof(double));
    const int label = static_cast<int>(dataset.labels[i]);
    mix(&label, sizeof(label));
  }
  return hex64(h);
}

void save_model(const TrainedClassifier& model, std::ostream& out) {
  nlohmann::json classes = nlohmann::json::array();
  for (Label label : model.classes) {
    classes.push_back(features::to_string(label));
  }
  nlohmann::json j = {{"format", kFormatName},
                      {"version", kFormatVersion},
                      {"kind", to_string(model.kind)},
                      {"classes", std::move(classes)},
                      {"n_features", model.n_features()},
                      {"seed", model.seed},
                      {"data_fingerprint", model.data_fingerprint},
                      {"hyperparams", hyper_to_json(model.hyper)},
                      {"normalization", {{"mean", model.norm.mean}, {"scale", model.norm.scale}}},
                      {"params", model.impl->params_json()}};
  j["content_hash"] = hash_json(j);
  out << j.dump(2) << '\n';
}

TrainedClassifier load_model(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model artifact is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kFormatName) {
    throw ValidationError("not a windclime model artifact");
  }
  if (j.at("version").get<int>() != kFormatVersion) {
    throw ValidationError("unsupported model artifact version " +
                          j.at("version").dump());
  }
  const std::string stored_hash = j.at("content_hash").get<std::string>();
  nlohmann::json without_hash = j;
  without_hash.erase("content_hash");
  if (hash_json(without_hash) != stored_hash) {
    throw ValidationError("model artifact content hash mismatch");
  }

  TrainedClassifier model;
  model.kind = parse_model_kind(j.at("kind").get<std::string>());
  model.hyper = hyper_from_json(j.at("hyperparams"));
  model.seed = j.at("seed").get<std::uint64_t>();
  model.data_fingerprint = j.at("data_fingerprint").get<std::string>();
  for (const auto& name : j.at("classes")) {
    model.classes.push_back(features::parse_label(name.get<std::string>()));
  }
  model.norm.mean = j.at("normalization").at("mean").get<std::vector<double>>();
  model.norm.scale = j.at("normalization").at("scale").get<std::vector<double>>();
  if (model.norm.mean.size() != j.at("n_features").get<std::size_t>()) {
    throw ValidationError("model artifact normalization size mismatch");
  }

  const nlohmann::json& params = j.at("params");
  switch (model.kind) {
    case ModelKind::knn: model.impl = detail::knn_from_json(params); break;
    case ModelKind::naive_bayes: model.impl = detail::naive_bayes_from_json(params); break;
    case ModelKind::svm: model.impl = detail::svm_from_json(params); break;
    case ModelKind::gbdt: model.impl = detail::gbdt_from_json(params); break;
    case ModelKind::random_forest: model.impl = detail::random_forest_from_json(params); break;
    case ModelKind::logistic: model.impl = detail::logistic_from_json(params); break;
  }
  return model;
}

}  // namespace windclime::learn
