#include "wpg/genflow.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "wpg/error.hpp"

namespace wpg {

void GenConfig::validate() const {
  auto bad = [](const std::string& what) { return Error(ErrorCode::kInvalidConfig, what); };
  if (max_depth < 1) throw bad("max_depth must be >= 1");
  if (max_branch < 2) throw bad("max_branch must be >= 2");
  if (!(p_extend >= 0.0 && p_extend <= 1.0)) throw bad("p_extend must lie in [0, 1]");
  if (!(p_split >= 0.0 && p_split <= 1.0)) throw bad("p_split must lie in [0, 1]");
}

std::string_view to_string(UsefulnessLabel label) {
  switch (label) {
    case UsefulnessLabel::kA: return "A";
    case UsefulnessLabel::kB: return "B";
    case UsefulnessLabel::kC: return "C";
    case UsefulnessLabel::kUnlabeled: return "Unlabeled";
  }
  return "Unlabeled";
}

std::optional<UsefulnessLabel> usefulness_from_string(std::string_view name) {
  if (name == "A") return UsefulnessLabel::kA;
  if (name == "B") return UsefulnessLabel::kB;
  if (name == "C") return UsefulnessLabel::kC;
  if (name == "Unlabeled") return UsefulnessLabel::kUnlabeled;
  return std::nullopt;
}

std::string_view usefulness_meaning(UsefulnessLabel label) {
  switch (label) {
    case UsefulnessLabel::kA: return "convenient and frequently used";
    case UsefulnessLabel::kB: return "possible to use";
    case UsefulnessLabel::kC: return "inconvenient and not used";
    case UsefulnessLabel::kUnlabeled: return "not yet judged";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Generator

WorkflowGenerator::WorkflowGenerator(const Catalog& catalog, GenConfig config)
    : catalog_(catalog), config_(config), rng_(config.seed) {
  config_.validate();
}

std::optional<std::vector<Action>> WorkflowGenerator::attempt() {
  const Limits limits = config_.limits();
  TransitionState state = init_state();
  std::vector<Action> taken;
  std::map<NodeId, std::size_t> split_target;
  std::optional<FunctionId> pending;

  auto has = [](const std::vector<Action>& legal, const Action& a) {
    return std::find(legal.begin(), legal.end(), a) != legal.end();
  };
  const Action seq = Action::apply(Constructor::kSequence);
  const Action split = Action::apply(Constructor::kParallelSplit);
  const Action call = Action::apply(Constructor::kCall);
  const Action stop = Action::stop();

  while (!state.complete()) {
    const auto legal = legal_actions(state, catalog_, limits);
    if (legal.empty()) return std::nullopt;
    const Slot slot = state.front();
    Action choice;
    switch (slot_kind(state, slot)) {
      case SlotKind::kRoot:
      case SlotKind::kTrigger:
      case SlotKind::kAction:
        choice = legal.front();
        break;
      case SlotKind::kPattern: {
        const bool want_split = rng_.bernoulli(config_.p_extend * config_.p_split);
        choice = (want_split && has(legal, split)) || !has(legal, seq) ? split : seq;
        break;
      }
      case SlotKind::kSplitAction: {
        const std::size_t count = state.tree().actions(slot.node).size();
        if (count == 0) {
          const std::size_t avail = admissible_actions(state.tree(), slot.node, catalog_).size();
          const std::size_t hi = std::min(config_.max_branch, avail);
          if (hi < 2) return std::nullopt;
          split_target[slot.node] = 2 + rng_.below(hi - 1);
        }
        choice = count < split_target[slot.node] && has(legal, call) ? call : stop;
        break;
      }
      case SlotKind::kChannel: {
        const auto candidates = candidate_functions(state, catalog_, limits);
        if (candidates.empty()) return std::nullopt;
        pending = candidates[rng_.below(candidates.size())];
        choice = Action::select(catalog_.function(*pending).channel);
        break;
      }
      case SlotKind::kFunction:
        choice = Action::select(catalog_.function(*pending).name);
        pending.reset();
        break;
      case SlotKind::kNext: {
        const bool can_seq = has(legal, seq);
        const bool can_split = has(legal, split);
        if ((can_seq || can_split) && rng_.bernoulli(config_.p_extend)) {
          choice = (can_split && rng_.bernoulli(config_.p_split)) || !can_seq ? split : seq;
        } else {
          choice = stop;
        }
        break;
      }
    }
    if (!has(legal, choice)) return std::nullopt;
    apply_structural(state, choice);
    taken.push_back(std::move(choice));
  }
  return taken;
}

std::vector<Action> WorkflowGenerator::next_actions() {
  for (std::size_t i = 0; i <= config_.retries; ++i) {
    if (auto actions = attempt()) return std::move(*actions);
  }
  throw Error(ErrorCode::kExhaustedSearch,
              "no workflow could be completed after " + std::to_string(config_.retries) + " retries");
}

Wast WorkflowGenerator::next() {
  const auto actions = next_actions();
  return to_wast(replay_structure(actions));
}

Wast generate_workflow(const Catalog& catalog, const GenConfig& config) {
  return WorkflowGenerator(catalog, config).next();
}

// ---------------------------------------------------------------------------
// Enumerator

namespace {

class Enumerator {
 public:
  Enumerator(const Catalog& catalog, const Limits& limits) : catalog_(catalog), limits_(limits) {
    if (limits.max_depth == 0) throw Error(ErrorCode::kInvalidConfig, "enumeration needs a finite max_depth");
  }

  std::vector<expr::Pattern> roots() const {
    std::vector<expr::Pattern> out;
    for (const MacroFunction* f : all()) {
      if (!f->can_trigger()) continue;
      std::vector<const MacroFunction*> succ;
      for (const MacroFunction* g : all()) {
        if (g->can_act() && kinds_compatible(f->output_kind, g->input_kind)) succ.push_back(g);
      }
      expand(expr::call(f->channel, f->name), succ, 1, /*chained=*/false, out);
    }
    return out;
  }

 private:
  std::vector<const MacroFunction*> all() const {
    std::vector<const MacroFunction*> out;
    for (const auto& ch : catalog_.channels()) {
      for (const auto& fn : ch.functions) out.push_back(&fn);
    }
    return out;
  }

  // Every way to realize an action Call of `g` in a pattern at `level`.
  std::vector<expr::Call> call_variants(const MacroFunction& g, std::size_t level) const {
    std::vector<expr::Call> out{expr::call(g.channel, g.name)};
    if (level >= limits_.max_depth || g.output_kind == DataKind::kNone) return out;
    std::vector<const MacroFunction*> succ;
    for (const MacroFunction* h : all()) {
      if (h->can_act() && catalog_.chainable(g, *h)) succ.push_back(h);
    }
    std::vector<expr::Pattern> nested;
    expand(expr::Call{}, succ, level + 1, /*chained=*/true, nested);
    for (auto& p : nested) out.push_back(expr::call(g.channel, g.name, std::move(p)));
    return out;
  }

  // Sequence and Parallel_Split patterns at `level` over successor set `succ`.
  void expand(const expr::Call& trigger, const std::vector<const MacroFunction*>& succ, std::size_t level,
              bool chained, std::vector<expr::Pattern>& out) const {
    std::vector<std::vector<expr::Call>> variants;
    for (const MacroFunction* g : succ) variants.push_back(call_variants(*g, level));

    for (const auto& vs : variants) {
      for (const auto& v : vs) {
        out.push_back(chained ? expr::chained_sequence(v) : expr::sequence(trigger, v));
      }
    }
    const std::size_t max_arity =
        limits_.max_branch == 0 ? succ.size() : std::min(limits_.max_branch, succ.size());
    std::vector<std::size_t> picked;
    std::vector<bool> used(succ.size(), false);
    // Ordered selections of distinct successors, then the product of variants.
    std::function<void()> choose = [&] {
      if (picked.size() >= 2) {
        std::vector<expr::Call> current;
        std::function<void(std::size_t)> product = [&](std::size_t i) {
          if (i == picked.size()) {
            out.push_back(chained ? expr::chained_split(current) : expr::parallel_split(trigger, current));
            return;
          }
          for (const auto& v : variants[picked[i]]) {
            current.push_back(v);
            product(i + 1);
            current.pop_back();
          }
        };
        product(0);
      }
      if (picked.size() == max_arity) return;
      for (std::size_t i = 0; i < succ.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        picked.push_back(i);
        choose();
        picked.pop_back();
        used[i] = false;
      }
    };
    choose();
  }

  const Catalog& catalog_;
  Limits limits_;
};

}  // namespace

std::size_t enumerate_workflows(const Catalog& catalog, const Limits& limits,
                                const std::function<void(const Wast&)>& visit) {
  const auto patterns = Enumerator(catalog, limits).roots();
  for (const auto& p : patterns) visit(expr::workflow(p));
  return patterns.size();
}

std::vector<Wast> enumerate_workflows(const Catalog& catalog, const Limits& limits) {
  std::vector<Wast> out;
  enumerate_workflows(catalog, limits, [&](const Wast& w) { out.push_back(w); });
  return out;
}

Wast permute_parallel_branches(const Wast& w, std::uint64_t seed) {
  Rng rng(seed);
  std::function<void(expr::Pattern&)> shuffle = [&](expr::Pattern& p) {
    if (p.kind == Constructor::kParallelSplit) {
      for (std::size_t i = p.actions.size(); i > 1; --i) {
        std::swap(p.actions[i - 1], p.actions[rng.below(i)]);
      }
    }
    for (auto& c : p.actions) {
      for (auto& n : c.next) shuffle(n);
    }
  };
  expr::Pattern root = expr::pattern_from_tree(w.tree(), w.tree().root_pattern());
  shuffle(root);
  return expr::workflow(root);
}

}  // namespace wpg
