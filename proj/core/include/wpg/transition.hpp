#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wpg/action.hpp"
#include "wpg/catalog.hpp"
#include "wpg/grammar.hpp"
#include "wpg/tree.hpp"

namespace wpg {

/// An unfilled field of the partial tree. `node == kNoNode` is the root
/// "stmt" slot that exists before anything is built.
struct Slot {
  NodeId node = kNoNode;
  std::uint8_t field = 0;

  bool operator==(const Slot&) const = default;
};

enum class SlotKind {
  kRoot,         // stmt root
  kPattern,      // Workflow.pattern
  kTrigger,      // Sequence/Parallel_Split trigger (optional)
  kAction,       // Sequence action (single)
  kSplitAction,  // Parallel_Split action (sequential)
  kChannel,      // Call channel, nothing selected yet
  kFunction,     // Call channel, channel selected, function pending
  kNext,         // Call next (optional)
};

/// Expansion bounds shared by the generator, the enumerator and the decoder.
/// Zero means unbounded.
struct Limits {
  std::size_t max_depth = 0;   // pattern nodes on any root-to-leaf path
  std::size_t max_branch = 0;  // actions per Parallel_Split

  bool operator==(const Limits&) const = default;
};

/// A partially built workflow tree plus the ordered list of open slots.
/// The frontier is kept pre-order: the front slot is always expanded next.
class TransitionState {
 public:
  const Tree& tree() const { return tree_; }
  std::size_t step() const { return step_; }
  bool complete() const { return stack_.empty(); }

  const Slot& front() const;
  // Open slots, front first.
  std::vector<Slot> frontier() const { return {stack_.rbegin(), stack_.rend()}; }
  std::size_t frontier_size() const { return stack_.size(); }

 private:
  friend TransitionState init_state(const GrammarSpec& grammar);
  friend void apply_structural(TransitionState& state, const Action& action);

  Tree tree_;
  std::vector<Slot> stack_;  // back() is the front of the frontier
  std::size_t step_ = 0;
};

TransitionState init_state(const GrammarSpec& grammar = builtin_wpg());

bool is_complete(const TransitionState& state);

SlotKind slot_kind(const TransitionState& state, const Slot& slot);

// Exactly the grammar- and catalog-legal actions at the front slot, in
// grammar order (ApplyConstr), catalog order (SelectMacr), then StopExpnsn.
// Throws kCompleteState when nothing is left to expand.
std::vector<Action> legal_actions(const TransitionState& state, const Catalog& catalog,
                                  const Limits& limits = {});

// Functions admissible for the Call whose channel/function is at the front
// slot, across all channels.
std::vector<FunctionId> candidate_functions(const TransitionState& state, const Catalog& catalog,
                                            const Limits& limits = {});

// Functions that could still be added as an action of `pattern` right now
// (data-flow predecessor compatible, not already a sibling).
std::vector<FunctionId> admissible_actions(const Tree& tree, NodeId pattern, const Catalog& catalog);

// Throws kIllegalAction naming the slot and action when `action` is not legal.
TransitionState apply_action(const TransitionState& state, const Action& action, const Catalog& catalog,
                             const Limits& limits = {});
void apply_action_in_place(TransitionState& state, const Action& action, const Catalog& catalog,
                           const Limits& limits = {});

// Grammar-only application (no catalog or data-flow checks). Throws
// kIllegalAction when the action does not fit the slot's type/cardinality.
void apply_structural(TransitionState& state, const Action& action);

TransitionState replay(std::span<const Action> actions, const Catalog& catalog, const Limits& limits = {});
// Grammar-only replay; used where no catalog is at hand (statistics).
TransitionState replay_structure(std::span<const Action> actions);

// Throws kInvalidWast if the state still has open slots.
Wast to_wast(const TransitionState& state);

/// The unique action sequence whose replay from init_state() rebuilds `w`.
/// Throws kInvalidWast when the tree is not structurally well-formed.
std::vector<Action> oracle_actions(const Wast& w);

struct Violation {
  std::string where;
  std::string message;
};

// Checks structural invariants, catalog membership, capabilities and the
// data flow on every edge. An empty result means the workflow is valid.
std::vector<Violation> validate_wast(const Wast& w, const Catalog& catalog, const Limits& limits = {});

// Invariant check on any reachable state (used by the fuzzers). Returns
// human-readable problems; empty when the state is sound.
std::vector<std::string> check_state_invariants(const TransitionState& state, const Limits& limits = {});

// Display strings in the style of the expansion table: "stmt root",
// "func? trigger", the selected channel name during function selection, ...
std::string frontier_label(const TransitionState& state, const Slot& slot);
// "Sequence(func? trigger, func action)", "SelectMacr[SMS]",
// "StopExpnsn(close the frontier field)".
std::string pretty_action(const Action& action);

}  // namespace wpg
