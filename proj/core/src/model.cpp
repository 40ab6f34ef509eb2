#include "wpg/parser/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wpg/error.hpp"

namespace wpg {

BaselineModel::BaselineModel(std::vector<std::string> names, std::vector<double> weights)
    : names_(std::move(names)), weights_(std::move(weights)) {
  if (names_.size() != weights_.size()) {
    throw Error(ErrorCode::kModelFormat, "feature_names and weights differ in length");
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!std::isfinite(weights_[i])) throw Error(ErrorCode::kModelFormat, "non-finite weight for " + names_[i]);
    if (!index_.emplace(names_[i], i).second) {
      throw Error(ErrorCode::kModelFormat, "duplicate feature name " + names_[i]);
    }
  }
}

std::ptrdiff_t BaselineModel::find(const std::string& name) const {
  const auto it = index_.find(name);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::size_t BaselineModel::intern(const std::string& name) {
  const auto [it, inserted] = index_.emplace(name, names_.size());
  if (inserted) {
    names_.push_back(name);
    weights_.push_back(0.0);
  }
  return it->second;
}

std::string model_to_json(const BaselineModel& model) {
  nlohmann::ordered_json j;
  j["version"] = BaselineModel::kFormatVersion;
  j["feature_names"] = model.feature_names();
  j["weights"] = model.weights();
  j["tokenizer"] = kTokenizerVersion;
  return j.dump() + "\n";
}

BaselineModel model_from_json(std::string_view text) {
  using nlohmann::json;
  try {
    const json j = json::parse(text);
    if (j.at("version").get<int>() != BaselineModel::kFormatVersion) {
      throw Error(ErrorCode::kModelFormat, "unsupported model version");
    }
    if (j.at("tokenizer").get<std::string>() != kTokenizerVersion) {
      throw Error(ErrorCode::kModelFormat, "model was trained with another tokenizer");
    }
    return BaselineModel(j.at("feature_names").get<std::vector<std::string>>(),
                         j.at("weights").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kModelFormat, std::string("bad model file: ") + e.what());
  }
}

void save_model(const BaselineModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write model " + path.string());
  out << model_to_json(model);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

BaselineModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open model " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

void log_softmax(std::vector<double>& scores) {
  const double z = log_sum_exp(scores);
  for (double& s : scores) s -= z;
}

LogLinearScorer::LogLinearScorer(const Catalog& catalog, BaselineModel model)
    : features_(catalog), model_(std::move(model)) {}

std::vector<double> LogLinearScorer::score(const ScoringContext& ctx) const {
  const auto feats = features_.extract(ctx);
  std::vector<double> out(feats.size(), 0.0);
  for (std::size_t i = 0; i < feats.size(); ++i) {
    for (const auto& [name, value] : feats[i]) {
      const auto k = model_.find(name);
      if (k >= 0) out[i] += model_.weights()[static_cast<std::size_t>(k)] * value;
    }
  }
  log_softmax(out);
  return out;
}

}  // namespace wpg
