#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "wpg/catalog.hpp"
#include "wpg/parser/scorer.hpp"

namespace wpg {

inline constexpr std::size_t kUnboundedBeam = std::numeric_limits<std::size_t>::max();

struct BeamOptions {
  std::size_t width = 5;
  std::size_t max_steps = 0;  // 0 = default_max_steps(limits)
  bool check_normalization = false;
};

/// A complete parse with its action sequence and Σ_t log q(a_t | a_<t, x).
struct Parse {
  Wast wast;
  std::vector<Action> actions;
  double log_score = 0;
};

// 4 × the number of tree nodes the limits allow (1000 when unbounded).
std::size_t default_max_steps(const Limits& limits);

/// Beam search over legal actions. Each step expands every live hypothesis
/// by all legal actions, keeps the best `width` by (score desc, action text
/// asc), and sets completed ones aside; zero-probability extensions are
/// dropped. Stops when no hypothesis is live or none can beat the width-th
/// finished one. Returns at most `width` parses, best first.
/// Throws kNoCompleteHypothesis if nothing completes within max_steps.
std::vector<Parse> beam_search(const Utterance& x, const Catalog& catalog, const Scorer& scorer,
                               const Limits& limits = {}, const BeamOptions& options = {});

// Follows the single best action (same tie-break) until complete.
Parse greedy_decode(const Utterance& x, const Catalog& catalog, const Scorer& scorer, const Limits& limits = {},
                    std::size_t max_steps = 0);

}  // namespace wpg
