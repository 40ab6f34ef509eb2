#include "wpg/parser/evaluate.hpp"

#include <algorithm>

#include "json.hpp"
#include "wpg/error.hpp"

namespace wpg {

namespace {

const Scorer& pick_scorer(const ParserBundle& bundle, const std::vector<Action>* gold,
                          std::optional<OracleScorer>& storage) {
  if (bundle.oracle) {
    if (gold == nullptr) throw Error(ErrorCode::kInvalidConfig, "the oracle scorer needs a gold sequence");
    storage.emplace(*gold);
    return *storage;
  }
  if (bundle.scorer == nullptr) throw Error(ErrorCode::kInvalidConfig, "no scorer configured");
  return *bundle.scorer;
}

// Teacher-forced argmax hits along the gold sequence.
std::size_t forced_hits(const Utterance& x, const std::vector<Action>& gold, const Scorer& scorer,
                        const ParserBundle& bundle) {
  TransitionState state = init_state();
  std::size_t hits = 0;
  for (std::size_t t = 0; t < gold.size(); ++t) {
    const auto legal = legal_actions(state, bundle.catalog, bundle.limits);
    const ScoringContext ctx{x, std::span<const Action>(gold).first(t), state, legal, bundle.catalog,
                             bundle.limits};
    const auto scores = scorer.score(ctx);
    std::size_t best = 0;
    for (std::size_t i = 1; i < legal.size(); ++i) {
      if (scores[i] > scores[best] || (scores[i] == scores[best] && legal[i].text() < legal[best].text())) best = i;
    }
    hits += legal[best] == gold[t] ? 1 : 0;
    apply_structural(state, gold[t]);
  }
  return hits;
}

}  // namespace

Parse parse_text(std::string_view text, const ParserBundle& bundle, const std::vector<Action>* gold) {
  std::optional<OracleScorer> storage;
  const Scorer& scorer = pick_scorer(bundle, gold, storage);
  const Utterance x = tokenize(text);
  return beam_search(x, bundle.catalog, scorer, bundle.limits, bundle.beam).front();
}

Metrics evaluate(const std::vector<Example>& examples, const ParserBundle& bundle, const EvalOptions& options) {
  if (examples.empty()) throw Error(ErrorCode::kEmptyDataset, "cannot evaluate on an empty set");
  if (!options.allow_synthetic) {
    for (const auto& e : examples) {
      if (e.status != AnnotationStatus::kReviewed) {
        throw Error(ErrorCode::kUnreviewed,
                    e.id + " has status " + std::string(to_string(e.status)) +
                        "; evaluation needs reviewed descriptions (or allow synthetic NL)");
      }
    }
  }
  Metrics m;
  std::size_t exact = 0;
  std::size_t steps = 0;
  std::size_t hits = 0;
  for (const auto& e : examples) {
    std::optional<OracleScorer> storage;
    const Scorer& scorer = pick_scorer(bundle, &e.actions, storage);
    const Wast gold = to_wast(replay(e.actions, bundle.catalog, bundle.limits));
    const Utterance x = tokenize(e.nl);
    bool ok = false;
    try {
      ok = beam_search(x, bundle.catalog, scorer, bundle.limits, bundle.beam).front().wast == gold;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kNoCompleteHypothesis) throw;
    }
    exact += ok ? 1 : 0;
    hits += forced_hits(x, e.actions, scorer, bundle);
    steps += e.actions.size();
    auto& d = m.per_depth[gold.tree().pattern_depth()];
    ++d.n;
    d.exact += ok ? 1 : 0;
  }
  m.n = examples.size();
  m.exact_match = static_cast<double>(exact) / static_cast<double>(m.n);
  m.action_accuracy = steps == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(steps);
  return m;
}

std::string metrics_to_json(const Metrics& m) {
  nlohmann::ordered_json j;
  j["exact_match"] = m.exact_match;
  j["action_accuracy"] = m.action_accuracy;
  nlohmann::ordered_json depth = nlohmann::ordered_json::object();
  for (const auto& [d, v] : m.per_depth) {
    depth[std::to_string(d)] = {{"n", v.n},
                                {"exact_match", static_cast<double>(v.exact) / static_cast<double>(v.n)}};
  }
  j["per_depth"] = std::move(depth);
  j["n"] = m.n;
  return j.dump(2);
}

}  // namespace wpg
