#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wpg/error.hpp"
#include "wpg/parser/model.hpp"
#include "wpg/random.hpp"

namespace wpg {

TrainingSet compile_examples(const std::vector<Example>& examples, const Catalog& catalog, const Limits& limits,
                             BaselineModel& model, bool grow) {
  const FeatureExtractor extractor(catalog);
  TrainingSet set;
  set.examples.reserve(examples.size());
  for (const auto& e : examples) {
    const Utterance x = tokenize(e.nl);
    CompiledExample ce;
    TransitionState state = init_state();
    for (std::size_t t = 0; t < e.actions.size(); ++t) {
      const auto legal = legal_actions(state, catalog, limits);
      const auto it = std::find(legal.begin(), legal.end(), e.actions[t]);
      if (it == legal.end()) {
        throw Error(ErrorCode::kIllegalAction,
                    e.id + ": step " + std::to_string(t + 1) + " action " + e.actions[t].text() + " is not legal");
      }
      const ScoringContext ctx{x, std::span<const Action>(e.actions).first(t), state, legal, catalog, limits};
      CompiledStep step;
      step.gold = static_cast<std::size_t>(it - legal.begin());
      for (auto& fs : extractor.extract(ctx)) {
        std::vector<std::pair<std::size_t, double>> sparse;
        for (auto& [name, value] : fs) {
          if (value == 0.0) continue;
          if (grow) {
            sparse.emplace_back(model.intern(name), value);
          } else if (const auto k = model.find(name); k >= 0) {
            sparse.emplace_back(static_cast<std::size_t>(k), value);
          }
        }
        step.actions.push_back(std::move(sparse));
      }
      // Steps with a single legal action carry no information.
      if (legal.size() > 1) ce.steps.push_back(std::move(step));
      apply_structural(state, e.actions[t]);
    }
    set.examples.push_back(std::move(ce));
  }
  return set;
}

namespace {

double example_objective(const CompiledExample& ex, std::span<const double> w, double scale,
                         std::vector<double>* grad) {
  double total = 0;
  std::vector<double> scores;
  for (const auto& step : ex.steps) {
    scores.assign(step.actions.size(), 0.0);
    for (std::size_t a = 0; a < step.actions.size(); ++a) {
      for (const auto& [k, v] : step.actions[a]) scores[a] += w[k] * v;
    }
    log_softmax(scores);
    total += scores[step.gold];
    if (grad != nullptr) {
      for (std::size_t a = 0; a < step.actions.size(); ++a) {
        const double coeff = ((a == step.gold ? 1.0 : 0.0) - std::exp(scores[a])) * scale;
        if (coeff == 0.0) continue;
        for (const auto& [k, v] : step.actions[a]) (*grad)[k] += coeff * v;
      }
    }
  }
  return total;
}

double batch_objective(const TrainingSet& data, std::span<const std::size_t> batch, std::span<const double> w,
                       double l2, std::vector<double>* grad) {
  if (grad != nullptr) grad->assign(w.size(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double ll = 0;
  for (std::size_t i : batch) ll += example_objective(data.examples[i], w, scale, grad);
  double norm = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    norm += w[k] * w[k];
    if (grad != nullptr) (*grad)[k] -= l2 * w[k];
  }
  return ll * scale - 0.5 * l2 * norm;
}

std::vector<std::size_t> all_indices(const TrainingSet& data) {
  std::vector<std::size_t> idx(data.examples.size());
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

double log_likelihood(const TrainingSet& data, std::span<const double> w) {
  if (data.examples.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto idx = all_indices(data);
  return batch_objective(data, idx, w, 0.0, nullptr);
}

double objective(const TrainingSet& data, std::span<const double> w, double l2, std::vector<double>* grad) {
  if (data.examples.empty()) throw Error(ErrorCode::kEmptyDataset, "objective over an empty training set");
  const auto idx = all_indices(data);
  return batch_objective(data, idx, w, l2, grad);
}

TrainResult train_scorer(const std::vector<Example>& train, const std::vector<Example>& dev,
                         const Catalog& catalog, const TrainConfig& config,
                         const std::function<void(const EpochReport&)>& on_epoch) {
  if (train.empty()) throw Error(ErrorCode::kEmptyDataset, "no training examples");
  if (!(config.learning_rate > 0) || !(config.l2 >= 0)) {
    throw Error(ErrorCode::kInvalidConfig, "learning rate must be positive and l2 non-negative");
  }
  TrainResult result;
  const TrainingSet train_set = compile_examples(train, catalog, config.limits, result.model, true);
  const TrainingSet dev_set = compile_examples(dev, catalog, config.limits, result.model, false);

  std::vector<double>& w = result.model.weights();
  std::vector<double> grad;
  std::vector<double> accum(w.size(), 0.0);
  std::vector<std::size_t> order = all_indices(train_set);
  const std::size_t batch = config.batch_size == 0 ? order.size() : std::min(config.batch_size, order.size());
  Rng rng(config.seed);

  auto report = [&](std::size_t epoch) {
    EpochReport r;
    r.epoch = epoch;
    r.objective = objective(train_set, w, config.l2, nullptr);
    r.train_log_likelihood = log_likelihood(train_set, w);
    r.dev_log_likelihood = log_likelihood(dev_set, w);
    if (!std::isfinite(r.objective)) {
      throw Error(ErrorCode::kNonFiniteLoss,
                  "objective became non-finite at epoch " + std::to_string(epoch) +
                      " (lower the learning rate or raise l2)");
    }
    result.epochs.push_back(r);
    if (on_epoch) on_epoch(r);
  };

  report(0);
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (batch < order.size()) {
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    }
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::span<const std::size_t> slice(order.data() + start, std::min(batch, order.size() - start));
      batch_objective(train_set, slice, w, config.l2, &grad);
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (config.optimizer == Optimizer::kAdaGrad) {
          accum[k] += grad[k] * grad[k];
          if (accum[k] > 0) w[k] += config.learning_rate * grad[k] / std::sqrt(accum[k]);
        } else {
          w[k] += config.learning_rate * grad[k];
        }
      }
    }
    report(epoch);
  }
  // Rebuild so the index matches the trained names.
  result.model = BaselineModel(result.model.feature_names(), result.model.weights());
  return result;
}

}  // namespace wpg
