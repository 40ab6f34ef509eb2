#include "wpg/tree.hpp"

#include <algorithm>
#include <functional>

#include "wpg/error.hpp"

namespace wpg {

std::string_view constructor_name(Constructor c) {
  switch (c) {
    case Constructor::kWorkflow: return "Workflow";
    case Constructor::kSequence: return "Sequence";
    case Constructor::kParallelSplit: return "Parallel_Split";
    case Constructor::kCall: return "Call";
  }
  return "";
}

std::optional<Constructor> constructor_from_name(std::string_view name) {
  for (Constructor c : {Constructor::kWorkflow, Constructor::kSequence,
                        Constructor::kParallelSplit, Constructor::kCall}) {
    if (constructor_name(c) == name) return c;
  }
  return std::nullopt;
}

std::size_t field_count(Constructor c) { return c == Constructor::kWorkflow ? 1 : 2; }

std::optional<FunctionRef> FunctionRef::parse(std::string_view dotted) {
  const auto dot = dotted.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == dotted.size() ||
      dotted.find('.', dot + 1) != std::string_view::npos) {
    return std::nullopt;
  }
  return FunctionRef{std::string(dotted.substr(0, dot)), std::string(dotted.substr(dot + 1))};
}

NodeId Tree::add_root(Constructor ctor) {
  if (!nodes_.empty()) throw Error(ErrorCode::kInvalidWast, "tree already has a root");
  nodes_.push_back(Node{ctor, kNoNode, 0, {}, {}, {}});
  root_ = 0;
  return root_;
}

NodeId Tree::add_child(NodeId parent, std::uint8_t field_index, Constructor ctor) {
  if (parent >= nodes_.size() || field_index >= field_count(nodes_[parent].ctor)) {
    throw Error(ErrorCode::kInvalidWast, "bad parent slot for new node");
  }
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{ctor, parent, field_index, {}, {}, {}});
  nodes_[parent].children[field_index].push_back(id);
  return id;
}

void Tree::set_channel(NodeId call, std::string channel) { nodes_.at(call).channel = std::move(channel); }

void Tree::set_function(NodeId call, std::string function) {
  nodes_.at(call).function = std::move(function);
}

NodeId Tree::graft(NodeId parent, std::uint8_t field_index, const Tree& other, NodeId other_node) {
  const Node& src = other.node(other_node);
  const NodeId id = parent == kNoNode ? add_root(src.ctor) : add_child(parent, field_index, src.ctor);
  nodes_[id].channel = src.channel;
  nodes_[id].function = src.function;
  for (std::uint8_t f = 0; f < 2; ++f) {
    for (NodeId child : src.children[f]) graft(id, f, other, child);
  }
  return id;
}

NodeId Tree::root_pattern() const {
  if (nodes_.empty()) return kNoNode;
  const auto& kids = nodes_[root_].children[field::kPattern];
  return kids.empty() ? kNoNode : kids.front();
}

NodeId Tree::trigger(NodeId pattern) const {
  const auto& kids = node(pattern).children[field::kTrigger];
  return kids.empty() ? kNoNode : kids.front();
}

std::span<const NodeId> Tree::actions(NodeId pattern) const {
  return node(pattern).children[field::kAction];
}

NodeId Tree::next(NodeId call) const {
  const auto& kids = node(call).children[field::kNext];
  return kids.empty() ? kNoNode : kids.front();
}

FunctionRef Tree::function_of(NodeId call) const {
  const Node& n = node(call);
  return FunctionRef{n.channel, n.function};
}

NodeId Tree::owning_pattern(NodeId call) const { return node(call).parent; }

std::size_t Tree::pattern_level(NodeId pattern) const {
  std::size_t level = 0;
  for (NodeId id = pattern; id != kNoNode; id = node(id).parent) {
    if (is_pattern(node(id).ctor)) ++level;
  }
  return level;
}

std::size_t Tree::pattern_depth() const {
  std::size_t best = 0;
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (is_pattern(nodes_[id].ctor)) best = std::max(best, pattern_level(id));
  }
  return best;
}

bool structurally_equal(const Tree& a, NodeId na, const Tree& b, NodeId nb) {
  const Node& x = a.node(na);
  const Node& y = b.node(nb);
  if (x.ctor != y.ctor || x.channel != y.channel || x.function != y.function) return false;
  for (std::uint8_t f = 0; f < 2; ++f) {
    if (x.children[f].size() != y.children[f].size()) return false;
    for (std::size_t i = 0; i < x.children[f].size(); ++i) {
      if (!structurally_equal(a, x.children[f][i], b, y.children[f][i])) return false;
    }
  }
  return true;
}

std::vector<FunctionRef> functions_in_order(const Tree& tree) {
  std::vector<FunctionRef> out;
  if (tree.empty()) return out;
  std::function<void(NodeId)> visit = [&](NodeId id) {
    const Node& n = tree.node(id);
    if (n.ctor == Constructor::kCall && !n.function.empty()) out.push_back(tree.function_of(id));
    for (std::uint8_t f = 0; f < 2; ++f) {
      for (NodeId child : n.children[f]) visit(child);
    }
  };
  visit(tree.root());
  return out;
}

namespace {

void render_debug(const Tree& tree, NodeId id, std::string& out) {
  const Node& n = tree.node(id);
  out += constructor_name(n.ctor);
  out += '(';
  if (n.ctor == Constructor::kCall) {
    out += n.channel.empty() ? "?" : n.channel;
    out += '.';
    out += n.function.empty() ? "?" : n.function;
    out += ", ";
    if (n.children[field::kNext].empty()) out += "null";
    else render_debug(tree, n.children[field::kNext].front(), out);
  } else {
    for (std::size_t f = 0; f < field_count(n.ctor); ++f) {
      if (f > 0) out += ", ";
      const auto& kids = n.children[f];
      if (kids.empty()) {
        out += "null";
      } else if (n.ctor == Constructor::kParallelSplit && f == field::kAction) {
        out += '[';
        for (std::size_t i = 0; i < kids.size(); ++i) {
          if (i > 0) out += ", ";
          render_debug(tree, kids[i], out);
        }
        out += ']';
      } else {
        render_debug(tree, kids.front(), out);
      }
    }
  }
  out += ')';
}

void render_outline(const Tree& tree, NodeId id, int indent, std::string_view role, std::string& out) {
  const Node& n = tree.node(id);
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
  if (!role.empty()) {
    out += role;
    out += ": ";
  }
  if (n.ctor == Constructor::kCall) {
    out += tree.function_of(id).str();
  } else {
    out += constructor_name(n.ctor);
  }
  out += '\n';
  if (n.ctor == Constructor::kWorkflow) {
    for (NodeId c : n.children[field::kPattern]) render_outline(tree, c, indent + 1, "", out);
  } else if (is_pattern(n.ctor)) {
    for (NodeId c : n.children[field::kTrigger]) render_outline(tree, c, indent + 1, "trigger", out);
    for (NodeId c : n.children[field::kAction]) render_outline(tree, c, indent + 1, "action", out);
  } else {
    for (NodeId c : n.children[field::kNext]) render_outline(tree, c, indent + 1, "next", out);
  }
}

}  // namespace

std::string debug_string(const Tree& tree) {
  std::string out;
  if (!tree.empty()) render_debug(tree, tree.root(), out);
  return out;
}

std::string outline(const Tree& tree) {
  std::string out;
  if (!tree.empty()) render_outline(tree, tree.root(), 0, "", out);
  return out;
}

namespace expr {

bool Pattern::operator==(const Pattern& o) const {
  return kind == o.kind && trigger == o.trigger && actions == o.actions;
}

bool Call::operator==(const Call& o) const { return function == o.function && next == o.next; }

Call call(std::string channel, std::string function) {
  return Call{FunctionRef{std::move(channel), std::move(function)}, {}};
}

Call call(std::string channel, std::string function, Pattern next) {
  Call c = call(std::move(channel), std::move(function));
  c.next.push_back(std::move(next));
  return c;
}

Pattern sequence(Call trigger, Call action) {
  Pattern p;
  p.kind = Constructor::kSequence;
  p.trigger.push_back(std::move(trigger));
  p.actions.push_back(std::move(action));
  return p;
}

Pattern parallel_split(Call trigger, std::vector<Call> actions) {
  Pattern p;
  p.kind = Constructor::kParallelSplit;
  p.trigger.push_back(std::move(trigger));
  p.actions = std::move(actions);
  return p;
}

Pattern chained_sequence(Call action) {
  Pattern p;
  p.kind = Constructor::kSequence;
  p.actions.push_back(std::move(action));
  return p;
}

Pattern chained_split(std::vector<Call> actions) {
  Pattern p;
  p.kind = Constructor::kParallelSplit;
  p.actions = std::move(actions);
  return p;
}

namespace {

void append_call(Tree& tree, NodeId parent, std::uint8_t field_index, const Call& c) {
  const NodeId id = tree.add_child(parent, field_index, Constructor::kCall);
  tree.set_channel(id, c.function.channel);
  tree.set_function(id, c.function.function);
  for (const auto& p : c.next) append_pattern(tree, id, field::kNext, p);
}

Call call_from_tree(const Tree& tree, NodeId id) {
  Call c{tree.function_of(id), {}};
  if (NodeId nx = tree.next(id); nx != kNoNode) c.next.push_back(pattern_from_tree(tree, nx));
  return c;
}

}  // namespace

void append_pattern(Tree& tree, NodeId parent, std::uint8_t field_index, const Pattern& p) {
  const NodeId id = tree.add_child(parent, field_index, p.kind);
  for (const auto& c : p.trigger) append_call(tree, id, field::kTrigger, c);
  for (const auto& c : p.actions) append_call(tree, id, field::kAction, c);
}

Wast workflow(const Pattern& pattern) {
  Tree tree;
  const NodeId root = tree.add_root(Constructor::kWorkflow);
  append_pattern(tree, root, field::kPattern, pattern);
  return Wast(std::move(tree));
}

Pattern pattern_from_tree(const Tree& tree, NodeId pattern) {
  Pattern p;
  p.kind = tree.node(pattern).ctor;
  if (NodeId t = tree.trigger(pattern); t != kNoNode) p.trigger.push_back(call_from_tree(tree, t));
  for (NodeId a : tree.actions(pattern)) p.actions.push_back(call_from_tree(tree, a));
  return p;
}

}  // namespace expr

}  // namespace wpg
