#pragma once

#include <span>
#include <vector>

#include "wpg/action.hpp"
#include "wpg/catalog.hpp"
#include "wpg/parser/tokenizer.hpp"
#include "wpg/transition.hpp"

namespace wpg {

struct ScoringContext {
  const Utterance& utterance;
  std::span<const Action> history;  // a_<t
  const TransitionState& state;
  std::span<const Action> legal;    // legal_actions(state)
  const Catalog& catalog;
  const Limits& limits;
};

/// q(a_t | a_<t, x): one log-probability per legal action, aligned with
/// ctx.legal. The exponentiated values must sum to 1.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<double> score(const ScoringContext& ctx) const = 0;
};

class UniformScorer final : public Scorer {
 public:
  std::vector<double> score(const ScoringContext& ctx) const override;
};

/// Puts all mass on the gold action while the history follows the gold
/// sequence; uniform once it has left it.
class OracleScorer final : public Scorer {
 public:
  explicit OracleScorer(std::vector<Action> gold) : gold_(std::move(gold)) {}
  std::vector<double> score(const ScoringContext& ctx) const override;

 private:
  std::vector<Action> gold_;
};

// log Σ exp(v); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> values);

// Throws kNormalization when exp(scores) does not sum to 1 within `tol`.
void check_normalized(std::span<const double> scores, double tol = 1e-6);

/// Σ_t log q(a_t | a_<t, x) along `actions`. Every action must be legal
/// (kIllegalAction) and every step normalized (kNormalization).
double sequence_log_prob(std::span<const Action> actions, const Utterance& x, const Scorer& scorer,
                         const Catalog& catalog, const Limits& limits = {});
// Along oracle_actions(z).
double sequence_log_prob(const Wast& z, const Utterance& x, const Scorer& scorer, const Catalog& catalog,
                         const Limits& limits = {});

}  // namespace wpg
