#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wpg/dataset.hpp"
#include "wpg/parser/features.hpp"
#include "wpg/parser/scorer.hpp"

namespace wpg {

/// Weights of the log-linear baseline scorer, keyed by feature name.
class BaselineModel {
 public:
  static constexpr int kFormatVersion = 1;

  BaselineModel() = default;
  BaselineModel(std::vector<std::string> names, std::vector<double> weights);

  const std::vector<std::string>& feature_names() const { return names_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& weights() { return weights_; }
  std::size_t size() const { return names_.size(); }

  // Index of a feature, or -1 when unknown.
  std::ptrdiff_t find(const std::string& name) const;
  // Index of a feature, adding it with weight 0 when new.
  std::size_t intern(const std::string& name);

  bool operator==(const BaselineModel& o) const { return names_ == o.names_ && weights_ == o.weights_; }

 private:
  std::vector<std::string> names_;
  std::vector<double> weights_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::string model_to_json(const BaselineModel& model);
// Throws kModelFormat.
BaselineModel model_from_json(std::string_view text);
void save_model(const BaselineModel& model, const std::filesystem::path& path);
BaselineModel load_model(const std::filesystem::path& path);

/// Locally normalized log-linear scorer: q(a|...) ∝ exp(w · φ(a)) over the
/// legal set. Features unknown to the model contribute nothing.
class LogLinearScorer final : public Scorer {
 public:
  LogLinearScorer(const Catalog& catalog, BaselineModel model);

  const BaselineModel& model() const { return model_; }
  std::vector<double> score(const ScoringContext& ctx) const override;

 private:
  FeatureExtractor features_;
  BaselineModel model_;
};

// In-place log-softmax.
void log_softmax(std::vector<double>& scores);

/// Per-step sparse feature vectors of gold sequences, compiled once so that
/// objective evaluations do not rerun the transition system.
struct CompiledStep {
  std::vector<std::vector<std::pair<std::size_t, double>>> actions;
  std::size_t gold = 0;
};

struct CompiledExample {
  std::vector<CompiledStep> steps;
};

struct TrainingSet {
  std::vector<CompiledExample> examples;
};

// Compiles examples (nl + gold actions). With `grow` new features are
// added to the model; otherwise unknown ones are dropped.
TrainingSet compile_examples(const std::vector<Example>& examples, const Catalog& catalog, const Limits& limits,
                             BaselineModel& model, bool grow);

// Mean log-likelihood of the gold sequences under weights `w`.
double log_likelihood(const TrainingSet& data, std::span<const double> w);

/// Training objective (1/N) Σ log q(gold) − (l2/2)‖w‖² and, when `grad` is
/// non-null, its gradient.
double objective(const TrainingSet& data, std::span<const double> w, double l2, std::vector<double>* grad);

enum class Optimizer { kGradientAscent, kAdaGrad };

struct TrainConfig {
  double learning_rate = 0.5;
  std::size_t epochs = 60;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::kAdaGrad;
  std::size_t batch_size = 0;  // 0 = full batch
  Limits limits{3, 3};
};

struct EpochReport {
  std::size_t epoch = 0;
  double objective = 0;
  double train_log_likelihood = 0;
  double dev_log_likelihood = 0;  // NaN without dev data
};

struct TrainResult {
  BaselineModel model;
  std::vector<EpochReport> epochs;
};

/// Gradient ascent on the objective. Deterministic given the config.
/// Throws kEmptyDataset without training data and kNonFiniteLoss when the
/// objective stops being finite.
TrainResult train_scorer(const std::vector<Example>& train, const std::vector<Example>& dev,
                         const Catalog& catalog, const TrainConfig& config,
                         const std::function<void(const EpochReport&)>& on_epoch = {});

}  // namespace wpg
