#include "wpg/transition.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "wpg/error.hpp"

namespace wpg {

namespace {

Cardinality slot_cardinality(Constructor ctor, std::uint8_t f) {
  switch (ctor) {
    case Constructor::kWorkflow: return Cardinality::kSingle;
    case Constructor::kSequence:
      return f == field::kTrigger ? Cardinality::kOptional : Cardinality::kSingle;
    case Constructor::kParallelSplit:
      return f == field::kTrigger ? Cardinality::kOptional : Cardinality::kSequential;
    case Constructor::kCall:
      return f == field::kChannel ? Cardinality::kSingle : Cardinality::kOptional;
  }
  return Cardinality::kSingle;
}

const FieldDef& field_def(Constructor ctor, std::uint8_t f) {
  const ConstructorDef* def = builtin_wpg().find_constructor(constructor_name(ctor));
  return def->fields.at(f);
}

bool within_branch(const Limits& limits, std::size_t count) {
  return limits.max_branch == 0 || count <= limits.max_branch;
}

// Successor count needed by the trigger of a root pattern of this kind.
std::size_t required_successors(Constructor pattern_kind) {
  return pattern_kind == Constructor::kParallelSplit ? 2 : 1;
}

std::vector<FunctionId> trigger_candidates(const Catalog& catalog, std::size_t need) {
  std::vector<FunctionId> out;
  for (FunctionId f = 0; f < catalog.function_count(); ++f) {
    if (catalog.function(f).can_trigger() && catalog.tap_successors(f).size() >= need) out.push_back(f);
  }
  return out;
}

bool is_root_pattern(const Tree& tree, NodeId pattern) {
  const NodeId parent = tree.node(pattern).parent;
  return parent != kNoNode && tree.node(parent).ctor == Constructor::kWorkflow;
}

std::string where_of(const Tree& tree, NodeId id) {
  std::vector<std::string> parts;
  for (NodeId n = id; n != kNoNode; n = tree.node(n).parent) {
    const Node& node = tree.node(n);
    std::string part(constructor_name(node.ctor));
    if (node.ctor == Constructor::kCall && !node.function.empty()) {
      part += "<" + tree.function_of(n).str() + ">";
    }
    parts.push_back(std::move(part));
  }
  std::string out;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
    if (!out.empty()) out += "/";
    out += *it;
  }
  return out;
}

}  // namespace

const Slot& TransitionState::front() const {
  if (stack_.empty()) throw Error(ErrorCode::kCompleteState, "frontier is empty: the workflow is complete");
  return stack_.back();
}

TransitionState init_state(const GrammarSpec& grammar) {
  if (!is_builtin_wpg(grammar)) {
    throw Error(ErrorCode::kInvalidGrammar, "the transition system requires the workflow patterns grammar");
  }
  TransitionState s;
  s.stack_.push_back(Slot{});
  return s;
}

bool is_complete(const TransitionState& state) { return state.complete(); }

SlotKind slot_kind(const TransitionState& state, const Slot& slot) {
  if (slot.node == kNoNode) return SlotKind::kRoot;
  const Node& n = state.tree().node(slot.node);
  switch (n.ctor) {
    case Constructor::kWorkflow: return SlotKind::kPattern;
    case Constructor::kSequence:
      return slot.field == field::kTrigger ? SlotKind::kTrigger : SlotKind::kAction;
    case Constructor::kParallelSplit:
      return slot.field == field::kTrigger ? SlotKind::kTrigger : SlotKind::kSplitAction;
    case Constructor::kCall:
      if (slot.field == field::kNext) return SlotKind::kNext;
      return n.channel.empty() ? SlotKind::kChannel : SlotKind::kFunction;
  }
  return SlotKind::kRoot;
}

std::vector<FunctionId> admissible_actions(const Tree& tree, NodeId pattern, const Catalog& catalog) {
  const bool root = is_root_pattern(tree, pattern);
  FunctionRef pred;
  if (root) {
    const NodeId trig = tree.trigger(pattern);
    if (trig == kNoNode || tree.node(trig).function.empty()) return {};
    pred = tree.function_of(trig);
  } else {
    pred = tree.function_of(tree.node(pattern).parent);
  }
  const auto pred_id = catalog.find_id(pred);
  if (!pred_id) return {};
  const auto& succ = root ? catalog.tap_successors(*pred_id) : catalog.chain_successors(*pred_id);

  std::set<FunctionRef> used;
  if (tree.node(pattern).ctor == Constructor::kParallelSplit) {
    for (NodeId a : tree.actions(pattern)) {
      if (!tree.node(a).function.empty()) used.insert(tree.function_of(a));
    }
  }
  std::vector<FunctionId> out;
  for (FunctionId g : succ) {
    if (!used.contains(catalog.function(g).ref())) out.push_back(g);
  }
  return out;
}

std::vector<FunctionId> candidate_functions(const TransitionState& state, const Catalog& catalog,
                                            const Limits& limits) {
  const Slot& slot = state.front();
  const SlotKind kind = slot_kind(state, slot);
  if (kind != SlotKind::kChannel && kind != SlotKind::kFunction) return {};
  const Tree& tree = state.tree();
  const NodeId call = slot.node;
  const NodeId pattern = tree.node(call).parent;
  std::vector<FunctionId> out;
  if (tree.node(call).parent_field == field::kTrigger) {
    if (!is_root_pattern(tree, pattern)) return {};
    const std::size_t need = required_successors(tree.node(pattern).ctor);
    if (!within_branch(limits, need)) return {};
    out = trigger_candidates(catalog, need);
  } else {
    out = admissible_actions(tree, pattern, catalog);
  }
  if (kind == SlotKind::kFunction) {
    const std::string& channel = tree.node(call).channel;
    std::erase_if(out, [&](FunctionId f) { return catalog.function(f).channel != channel; });
  }
  return out;
}

std::vector<Action> legal_actions(const TransitionState& state, const Catalog& catalog, const Limits& limits) {
  const Slot& slot = state.front();
  const Tree& tree = state.tree();
  std::vector<Action> out;
  switch (slot_kind(state, slot)) {
    case SlotKind::kRoot:
      out.push_back(Action::apply(Constructor::kWorkflow));
      break;
    case SlotKind::kPattern:
      for (Constructor c : {Constructor::kSequence, Constructor::kParallelSplit}) {
        const std::size_t need = required_successors(c);
        if (within_branch(limits, need) && !trigger_candidates(catalog, need).empty()) {
          out.push_back(Action::apply(c));
        }
      }
      break;
    case SlotKind::kTrigger:
      // A chained pattern's trigger is the enclosing Call's function, so its
      // own trigger slot can only be closed.
      if (is_root_pattern(tree, slot.node)) out.push_back(Action::apply(Constructor::kCall));
      else out.push_back(Action::stop());
      break;
    case SlotKind::kAction:
      out.push_back(Action::apply(Constructor::kCall));
      break;
    case SlotKind::kSplitAction: {
      const std::size_t count = tree.actions(slot.node).size();
      if (within_branch(limits, count + 1) && !admissible_actions(tree, slot.node, catalog).empty()) {
        out.push_back(Action::apply(Constructor::kCall));
      }
      if (count >= 2) out.push_back(Action::stop());
      break;
    }
    case SlotKind::kChannel: {
      const auto candidates = candidate_functions(state, catalog, limits);
      for (const auto& ch : catalog.channels()) {
        const bool any = std::any_of(candidates.begin(), candidates.end(), [&](FunctionId f) {
          return catalog.function(f).channel == ch.name;
        });
        if (any) out.push_back(Action::select(ch.name));
      }
      break;
    }
    case SlotKind::kFunction:
      for (FunctionId f : candidate_functions(state, catalog, limits)) {
        out.push_back(Action::select(catalog.function(f).name));
      }
      break;
    case SlotKind::kNext: {
      const NodeId call = slot.node;
      const Node& n = tree.node(call);
      if (n.parent_field == field::kAction) {
        const NodeId pattern = n.parent;
        const bool can_extend = limits.max_depth == 0 || tree.pattern_level(pattern) < limits.max_depth;
        const auto id = catalog.find_id(tree.function_of(call));
        const std::size_t succ = id ? catalog.chain_successors(*id).size() : 0;
        if (can_extend && succ >= 1) out.push_back(Action::apply(Constructor::kSequence));
        if (can_extend && succ >= 2 && within_branch(limits, 2)) {
          out.push_back(Action::apply(Constructor::kParallelSplit));
        }
      }
      out.push_back(Action::stop());
      break;
    }
  }
  return out;
}

void apply_structural(TransitionState& state, const Action& action) {
  if (state.stack_.empty()) {
    throw Error(ErrorCode::kCompleteState, "cannot apply " + action.text() + ": the workflow is complete");
  }
  const Slot slot = state.stack_.back();
  const SlotKind kind = slot_kind(state, slot);
  auto illegal = [&](const char* why) {
    return Error(ErrorCode::kIllegalAction, "action " + action.text() + " is illegal at frontier field '" +
                                                frontier_label(state, slot) + "': " + why);
  };

  switch (action.kind) {
    case Action::Kind::kApplyConstr: {
      const auto ctor = constructor_from_name(action.token);
      if (!ctor) throw illegal("unknown constructor");
      const bool wants_pattern = kind == SlotKind::kPattern || kind == SlotKind::kNext;
      const bool wants_call = kind == SlotKind::kTrigger || kind == SlotKind::kAction || kind == SlotKind::kSplitAction;
      const bool ok = (kind == SlotKind::kRoot && *ctor == Constructor::kWorkflow) ||
                      (wants_pattern && is_pattern(*ctor)) || (wants_call && *ctor == Constructor::kCall);
      if (!ok) throw illegal("constructor type does not match the field type");
      NodeId id;
      if (kind == SlotKind::kRoot) {
        id = state.tree_.add_root(*ctor);
        state.stack_.pop_back();
      } else {
        id = state.tree_.add_child(slot.node, slot.field, *ctor);
        if (kind != SlotKind::kSplitAction) state.stack_.pop_back();
      }
      for (std::size_t f = field_count(*ctor); f-- > 0;) {
        state.stack_.push_back(Slot{id, static_cast<std::uint8_t>(f)});
      }
      break;
    }
    case Action::Kind::kSelectMacr:
      if (kind == SlotKind::kChannel) {
        state.tree_.set_channel(slot.node, action.token);
      } else if (kind == SlotKind::kFunction) {
        state.tree_.set_function(slot.node, action.token);
        state.stack_.pop_back();
      } else {
        throw illegal("only a type field takes a terminal");
      }
      break;
    case Action::Kind::kStopExpnsn: {
      const bool closable = kind == SlotKind::kTrigger || kind == SlotKind::kNext ||
                            (kind == SlotKind::kSplitAction && state.tree_.actions(slot.node).size() >= 2);
      if (!closable) throw illegal("only optional or sequential fields can be closed");
      state.stack_.pop_back();
      break;
    }
  }
  ++state.step_;
}

void apply_action_in_place(TransitionState& state, const Action& action, const Catalog& catalog,
                           const Limits& limits) {
  const auto legal = legal_actions(state, catalog, limits);
  if (std::find(legal.begin(), legal.end(), action) == legal.end()) {
    throw Error(ErrorCode::kIllegalAction, "action " + action.text() + " is illegal at frontier field '" +
                                               frontier_label(state, state.front()) + "'");
  }
  apply_structural(state, action);
}

TransitionState apply_action(const TransitionState& state, const Action& action, const Catalog& catalog,
                             const Limits& limits) {
  TransitionState next = state;
  apply_action_in_place(next, action, catalog, limits);
  return next;
}

TransitionState replay(std::span<const Action> actions, const Catalog& catalog, const Limits& limits) {
  TransitionState s = init_state();
  for (const auto& a : actions) apply_action_in_place(s, a, catalog, limits);
  return s;
}

TransitionState replay_structure(std::span<const Action> actions) {
  TransitionState s = init_state();
  for (const auto& a : actions) apply_structural(s, a);
  return s;
}

Wast to_wast(const TransitionState& state) {
  if (!state.complete()) {
    throw Error(ErrorCode::kInvalidWast, "workflow is incomplete: " + std::to_string(state.frontier_size()) +
                                             " open frontier field(s)");
  }
  return Wast(state.tree());
}

// ---------------------------------------------------------------------------
// Oracle

namespace {

class OracleEmitter {
 public:
  explicit OracleEmitter(const Tree& tree) : tree_(tree) {}

  std::vector<Action> run() {
    if (tree_.empty() || tree_.node(tree_.root()).ctor != Constructor::kWorkflow) {
      fail(tree_.empty() ? kNoNode : tree_.root(), "root must be a Workflow node");
    }
    const Node& root = tree_.node(tree_.root());
    if (root.children[field::kPattern].size() != 1) fail(tree_.root(), "Workflow needs exactly one pattern");
    out_.push_back(Action::apply(Constructor::kWorkflow));
    pattern(root.children[field::kPattern].front());
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(NodeId id, const std::string& why) const {
    throw Error(ErrorCode::kInvalidWast,
                "invalid WAST" + (id == kNoNode ? std::string() : " at " + where_of(tree_, id)) + ": " + why);
  }

  void pattern(NodeId id) {
    const Node& n = tree_.node(id);
    if (!is_pattern(n.ctor)) fail(id, "expected a Sequence or Parallel_Split");
    out_.push_back(Action::apply(n.ctor));
    const auto& trig = n.children[field::kTrigger];
    if (trig.size() > 1) fail(id, "optional trigger holds more than one value");
    if (trig.empty()) out_.push_back(Action::stop());
    else call(trig.front());
    const auto& acts = n.children[field::kAction];
    if (n.ctor == Constructor::kSequence && acts.size() != 1) fail(id, "Sequence needs exactly one action");
    if (n.ctor == Constructor::kParallelSplit && acts.size() < 2) fail(id, "sequential arity < 2");
    for (NodeId a : acts) call(a);
    if (n.ctor == Constructor::kParallelSplit) out_.push_back(Action::stop());
  }

  void call(NodeId id) {
    const Node& n = tree_.node(id);
    if (n.ctor != Constructor::kCall) fail(id, "expected a Call");
    if (n.channel.empty() || n.function.empty()) fail(id, "Call without a selected channel and function");
    out_.push_back(Action::apply(Constructor::kCall));
    out_.push_back(Action::select(n.channel));
    out_.push_back(Action::select(n.function));
    const auto& next = n.children[field::kNext];
    if (next.size() > 1) fail(id, "optional next holds more than one value");
    if (next.empty()) out_.push_back(Action::stop());
    else pattern(next.front());
  }

  const Tree& tree_;
  std::vector<Action> out_;
};

}  // namespace

std::vector<Action> oracle_actions(const Wast& w) { return OracleEmitter(w.tree()).run(); }

// ---------------------------------------------------------------------------
// Validation

namespace {

class Validator {
 public:
  Validator(const Tree& tree, const Catalog& catalog, const Limits& limits)
      : tree_(tree), catalog_(catalog), limits_(limits) {}

  std::vector<Violation> run() {
    if (tree_.empty()) {
      report(kNoNode, "empty tree");
      return std::move(out_);
    }
    const Node& root = tree_.node(tree_.root());
    if (root.ctor != Constructor::kWorkflow) {
      report(tree_.root(), "root must be a Workflow node");
      return std::move(out_);
    }
    if (root.children[field::kPattern].size() != 1) {
      report(tree_.root(), "Workflow needs exactly one pattern");
      return std::move(out_);
    }
    pattern(root.children[field::kPattern].front(), nullptr);
    if (limits_.max_depth != 0 && tree_.pattern_depth() > limits_.max_depth) {
      report(tree_.root(), "pattern depth " + std::to_string(tree_.pattern_depth()) + " exceeds the cap of " +
                               std::to_string(limits_.max_depth));
    }
    return std::move(out_);
  }

 private:
  void report(NodeId id, std::string message) {
    out_.push_back(Violation{id == kNoNode ? std::string("(root)") : where_of(tree_, id), std::move(message)});
  }

  // `chained_from` is the Call whose next field holds this pattern.
  void pattern(NodeId id, const MacroFunction* chained_from) {
    const Node& n = tree_.node(id);
    if (!is_pattern(n.ctor)) {
      report(id, "expected a Sequence or Parallel_Split");
      return;
    }
    const auto& trig = n.children[field::kTrigger];
    const auto& acts = n.children[field::kAction];
    const bool chained = tree_.node(n.parent).ctor == Constructor::kCall;

    const MacroFunction* trigger_fn = nullptr;
    if (trig.size() > 1) report(id, "optional trigger holds more than one value");
    if (chained && !trig.empty()) {
      report(id, "duplicated trigger: a chained pattern must have a null trigger");
    }
    if (!chained && trig.empty()) report(id, "the root pattern needs a trigger");
    if (!trig.empty()) trigger_fn = call(trig.front(), /*as_trigger=*/true);

    if (n.ctor == Constructor::kSequence && acts.size() != 1) {
      report(id, "Sequence needs exactly one action, found " + std::to_string(acts.size()));
    }
    if (n.ctor == Constructor::kParallelSplit) {
      if (acts.size() < 2) report(id, "sequential arity < 2");
      if (limits_.max_branch != 0 && acts.size() > limits_.max_branch) {
        report(id, "split arity " + std::to_string(acts.size()) + " exceeds the cap of " +
                       std::to_string(limits_.max_branch));
      }
    }

    const MacroFunction* pred = chained ? chained_from : trigger_fn;
    std::set<FunctionRef> seen;
    for (NodeId a : acts) {
      const MacroFunction* fn = call(a, /*as_trigger=*/false);
      if (n.ctor == Constructor::kParallelSplit && !tree_.node(a).function.empty() &&
          !seen.insert(tree_.function_of(a)).second) {
        report(a, "duplicate parallel branch " + tree_.function_of(a).str());
      }
      if (fn == nullptr || pred == nullptr) continue;
      check_edge(a, *pred, *fn, chained);
    }
  }

  void check_edge(NodeId at, const MacroFunction& pred, const MacroFunction& fn, bool chained) {
    const std::string edge = pred.ref().str() + " -> " + fn.ref().str();
    if (pred.output_kind == DataKind::kNone) {
      report(at, "no return value: " + edge + " (" + pred.ref().str() + " produces nothing to pass on)");
      return;
    }
    if (chained) {
      if (!catalog_.chainable(pred, fn)) {
        report(at, catalog_.mode() == ChainMode::kStrict && kinds_compatible(pred.output_kind, fn.input_kind)
                       ? "no chain rule for " + edge
                       : "data kind mismatch on chain " + edge + " (" + std::string(to_string(pred.output_kind)) +
                             " -> " + std::string(to_string(fn.input_kind)) + ")");
      }
    } else if (!kinds_compatible(pred.output_kind, fn.input_kind)) {
      report(at, "data kind mismatch on " + edge + " (" + std::string(to_string(pred.output_kind)) + " -> " +
                     std::string(to_string(fn.input_kind)) + ")");
    }
  }

  const MacroFunction* call(NodeId id, bool as_trigger) {
    const Node& n = tree_.node(id);
    if (n.ctor != Constructor::kCall) {
      report(id, "expected a Call");
      return nullptr;
    }
    if (n.channel.empty() || n.function.empty()) {
      report(id, "Call without a selected channel and function");
      return nullptr;
    }
    const MacroFunction* fn = catalog_.find(n.channel, n.function);
    if (fn == nullptr) {
      report(id, catalog_.find_channel(n.channel) == nullptr ? "unknown channel " + n.channel
                                                              : "unknown function " + n.channel + "." + n.function);
    } else if (as_trigger && !fn->can_trigger()) {
      report(id, fn->ref().str() + " cannot act as a trigger");
    } else if (!as_trigger && !fn->can_act()) {
      report(id, fn->ref().str() + " cannot act as an action");
    }
    const auto& next = n.children[field::kNext];
    if (next.size() > 1) report(id, "optional next holds more than one value");
    if (!next.empty()) {
      if (as_trigger) report(id, "a trigger Call cannot chain into a next pattern");
      pattern(next.front(), fn);
    }
    return fn;
  }

  const Tree& tree_;
  const Catalog& catalog_;
  const Limits& limits_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate_wast(const Wast& w, const Catalog& catalog, const Limits& limits) {
  return Validator(w.tree(), catalog, limits).run();
}

std::vector<std::string> check_state_invariants(const TransitionState& state, const Limits& limits) {
  std::vector<std::string> problems;
  const Tree& tree = state.tree();
  const auto frontier = state.frontier();

  if (tree.empty()) {
    if (frontier.size() != 1 || frontier.front().node != kNoNode) problems.push_back("empty tree needs the root slot");
    return problems;
  }

  // Tree property: every node reachable once, parent links consistent.
  std::vector<int> seen(tree.size(), 0);
  std::function<void(NodeId)> visit = [&](NodeId id) {
    if (++seen[id] > 1) {
      problems.push_back("node " + std::to_string(id) + " is shared");
      return;
    }
    const Node& n = tree.node(id);
    for (std::uint8_t f = 0; f < 2; ++f) {
      for (NodeId c : n.children[f]) {
        if (tree.node(c).parent != id || tree.node(c).parent_field != f) {
          problems.push_back("node " + std::to_string(c) + " has an inconsistent parent link");
        }
        visit(c);
      }
    }
  };
  visit(tree.root());
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i] != 1) problems.push_back("node " + std::to_string(i) + " is not reachable exactly once");
  }

  // Frontier order: each slot belongs to the previous slot's node or one of
  // its ancestors, with a later field when it is the same node.
  for (std::size_t i = 0; i + 1 < frontier.size(); ++i) {
    const Slot& a = frontier[i];
    const Slot& b = frontier[i + 1];
    bool ok = false;
    if (a.node == b.node) {
      ok = b.field > a.field;
    } else {
      for (NodeId n = tree.node(a.node).parent; n != kNoNode; n = tree.node(n).parent) {
        if (n == b.node) {
          ok = true;
          break;
        }
      }
    }
    if (!ok) problems.push_back("frontier is not in pre-order at position " + std::to_string(i));
  }

  // Cardinality of open and closed slots.
  auto open = [&](NodeId id, std::uint8_t f) {
    return std::find(frontier.begin(), frontier.end(), Slot{id, f}) != frontier.end();
  };
  for (NodeId id = 0; id < tree.size(); ++id) {
    const Node& n = tree.node(id);
    if (n.ctor == Constructor::kWorkflow && id != tree.root()) problems.push_back("Workflow below the root");
    for (std::uint8_t f = 0; f < field_count(n.ctor); ++f) {
      const bool is_open = open(id, f);
      const Cardinality card = slot_cardinality(n.ctor, f);
      const std::size_t count = n.children[f].size();
      if (n.ctor == Constructor::kCall && f == field::kChannel) {
        const bool filled = !n.channel.empty() && !n.function.empty();
        if (is_open == filled) problems.push_back("Call terminal slot state mismatch at node " + std::to_string(id));
        continue;
      }
      if (card == Cardinality::kSingle && count != (is_open ? 0u : 1u)) {
        problems.push_back("single field holds " + std::to_string(count) + " values at node " + std::to_string(id));
      }
      if (card == Cardinality::kOptional && (count > 1 || (is_open && count != 0))) {
        problems.push_back("optional field holds " + std::to_string(count) + " values at node " + std::to_string(id));
      }
      if (card == Cardinality::kSequential && !is_open && count < 2) {
        problems.push_back("sequential arity < 2 at node " + std::to_string(id));
      }
    }
    if (n.ctor == Constructor::kParallelSplit && limits.max_branch != 0 &&
        n.children[field::kAction].size() > limits.max_branch) {
      problems.push_back("split arity exceeds cap at node " + std::to_string(id));
    }
  }
  if (limits.max_depth != 0 && tree.pattern_depth() > limits.max_depth) problems.push_back("depth cap exceeded");
  return problems;
}

std::string frontier_label(const TransitionState& state, const Slot& slot) {
  if (slot.node == kNoNode) return "stmt root";
  const Node& n = state.tree().node(slot.node);
  if (n.ctor == Constructor::kCall && slot.field == field::kChannel && !n.channel.empty()) return n.channel;
  return field_def(n.ctor, slot.field).label();
}

std::string pretty_action(const Action& action) {
  switch (action.kind) {
    case Action::Kind::kApplyConstr: {
      const ConstructorDef* def = builtin_wpg().find_constructor(action.token);
      return def != nullptr ? def->signature() : action.text();
    }
    case Action::Kind::kSelectMacr: return action.text();
    case Action::Kind::kStopExpnsn: return "StopExpnsn(close the frontier field)";
  }
  return action.text();
}

}  // namespace wpg
