#include "wpg/parser/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wpg/error.hpp"

namespace wpg {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

std::vector<double> UniformScorer::score(const ScoringContext& ctx) const {
  return std::vector<double>(ctx.legal.size(), -std::log(static_cast<double>(ctx.legal.size())));
}

std::vector<double> OracleScorer::score(const ScoringContext& ctx) const {
  const std::size_t t = ctx.history.size();
  const bool on_gold = t < gold_.size() && std::equal(ctx.history.begin(), ctx.history.end(), gold_.begin());
  if (on_gold) {
    const auto it = std::find(ctx.legal.begin(), ctx.legal.end(), gold_[t]);
    if (it != ctx.legal.end()) {
      std::vector<double> out(ctx.legal.size(), kNegInf);
      out[static_cast<std::size_t>(it - ctx.legal.begin())] = 0.0;
      return out;
    }
  }
  return UniformScorer{}.score(ctx);
}

double log_sum_exp(std::span<const double> values) {
  double hi = kNegInf;
  for (double v : values) hi = std::max(hi, v);
  if (hi == kNegInf) return kNegInf;
  double sum = 0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

void check_normalized(std::span<const double> scores, double tol) {
  double total = 0;
  for (double v : scores) total += std::exp(v);
  if (!(std::abs(total - 1.0) <= tol)) {
    throw Error(ErrorCode::kNormalization, "step probabilities sum to " + std::to_string(total));
  }
}

double sequence_log_prob(std::span<const Action> actions, const Utterance& x, const Scorer& scorer,
                         const Catalog& catalog, const Limits& limits) {
  TransitionState state = init_state();
  double total = 0;
  for (std::size_t t = 0; t < actions.size(); ++t) {
    if (state.complete()) throw Error(ErrorCode::kIllegalAction, "action after the workflow is complete");
    const auto legal = legal_actions(state, catalog, limits);
    const auto it = std::find(legal.begin(), legal.end(), actions[t]);
    if (it == legal.end()) {
      throw Error(ErrorCode::kIllegalAction, "step " + std::to_string(t + 1) + ": " + actions[t].text() + " is not legal");
    }
    const ScoringContext ctx{x, actions.first(t), state, legal, catalog, limits};
    const auto scores = scorer.score(ctx);
    check_normalized(scores);
    total += scores[static_cast<std::size_t>(it - legal.begin())];
    apply_structural(state, actions[t]);
  }
  return total;
}

double sequence_log_prob(const Wast& z, const Utterance& x, const Scorer& scorer, const Catalog& catalog,
                         const Limits& limits) {
  const auto actions = oracle_actions(z);
  return sequence_log_prob(actions, x, scorer, catalog, limits);
}

}  // namespace wpg
