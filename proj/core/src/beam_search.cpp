#include "wpg/parser/beam_search.hpp"

#include <algorithm>
#include <cmath>

#include "wpg/error.hpp"

namespace wpg {

std::size_t default_max_steps(const Limits& limits) {
  if (limits.max_depth == 0 || limits.max_branch == 0) return 1000;
  // Workflow + per pattern level: pattern node, trigger-less calls, and
  // up to B action calls; generous 4x slack for the optional closures.
  const std::size_t b = limits.max_branch;
  std::size_t nodes = 1;
  std::size_t width = 1;
  for (std::size_t d = 1; d <= limits.max_depth; ++d) {
    nodes += width * (2 + b);
    width *= b;
  }
  return 4 * nodes;
}

namespace {

struct Hyp {
  TransitionState state;
  std::vector<Action> actions;
  std::vector<std::string> texts;
  double score = 0;
};

bool better(const Hyp& a, const Hyp& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.texts < b.texts;
}

}  // namespace

std::vector<Parse> beam_search(const Utterance& x, const Catalog& catalog, const Scorer& scorer,
                               const Limits& limits, const BeamOptions& options) {
  if (options.width == 0) throw Error(ErrorCode::kInvalidConfig, "beam width must be >= 1");
  const std::size_t max_steps = options.max_steps == 0 ? default_max_steps(limits) : options.max_steps;

  std::vector<Hyp> live(1, Hyp{init_state(), {}, {}, 0.0});
  std::vector<Hyp> finished;
  for (std::size_t step = 0; step < max_steps && !live.empty(); ++step) {
    std::vector<Hyp> next;
    for (const Hyp& h : live) {
      const auto legal = legal_actions(h.state, catalog, limits);
      const ScoringContext ctx{x, h.actions, h.state, legal, catalog, limits};
      const auto scores = scorer.score(ctx);
      if (scores.size() != legal.size()) throw Error(ErrorCode::kNormalization, "scorer returned wrong arity");
      if (options.check_normalization) check_normalized(scores);
      for (std::size_t i = 0; i < legal.size(); ++i) {
        if (scores[i] == -INFINITY) continue;
        Hyp child{h.state, h.actions, h.texts, h.score + scores[i]};
        apply_structural(child.state, legal[i]);
        child.actions.push_back(legal[i]);
        child.texts.push_back(legal[i].text());
        next.push_back(std::move(child));
      }
    }
    std::sort(next.begin(), next.end(), better);
    if (next.size() > options.width) next.resize(options.width);
    live.clear();
    for (auto& h : next) {
      if (h.state.complete()) {
        finished.push_back(std::move(h));
      } else {
        live.push_back(std::move(h));
      }
    }
    if (finished.size() >= options.width && !live.empty()) {
      std::sort(finished.begin(), finished.end(), better);
      // Log-probabilities only decrease, so live hypotheses cannot overtake.
      if (live.front().score <= finished[options.width - 1].score) live.clear();
    }
  }
  if (finished.empty()) {
    throw Error(ErrorCode::kNoCompleteHypothesis,
                "no complete workflow within " + std::to_string(max_steps) + " steps");
  }
  std::sort(finished.begin(), finished.end(), better);
  if (finished.size() > options.width) finished.resize(options.width);
  std::vector<Parse> out;
  out.reserve(finished.size());
  for (auto& h : finished) out.push_back(Parse{to_wast(h.state), std::move(h.actions), h.score});
  return out;
}

Parse greedy_decode(const Utterance& x, const Catalog& catalog, const Scorer& scorer, const Limits& limits,
                    std::size_t max_steps) {
  if (max_steps == 0) max_steps = default_max_steps(limits);
  TransitionState state = init_state();
  std::vector<Action> actions;
  double total = 0;
  for (std::size_t step = 0; step < max_steps && !state.complete(); ++step) {
    const auto legal = legal_actions(state, catalog, limits);
    const ScoringContext ctx{x, actions, state, legal, catalog, limits};
    const auto scores = scorer.score(ctx);
    std::size_t best = legal.size();
    for (std::size_t i = 0; i < legal.size(); ++i) {
      if (scores[i] == -INFINITY) continue;
      if (best == legal.size() || scores[i] > scores[best] ||
          (scores[i] == scores[best] && legal[i].text() < legal[best].text())) {
        best = i;
      }
    }
    if (best == legal.size()) break;
    total += scores[best];
    apply_structural(state, legal[best]);
    actions.push_back(legal[best]);
  }
  if (!state.complete()) throw Error(ErrorCode::kNoCompleteHypothesis, "greedy decoding did not complete");
  return Parse{to_wast(state), std::move(actions), total};
}

}  // namespace wpg
