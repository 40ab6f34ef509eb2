#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wpg {

enum class Constructor : std::uint8_t { kWorkflow, kSequence, kParallelSplit, kCall };

std::string_view constructor_name(Constructor c);
std::optional<Constructor> constructor_from_name(std::string_view name);
inline bool is_pattern(Constructor c) {
  return c == Constructor::kSequence || c == Constructor::kParallelSplit;
}

// Field positions, in grammar declaration order.
namespace field {
inline constexpr std::uint8_t kPattern = 0;  // Workflow
inline constexpr std::uint8_t kTrigger = 0;  // Sequence, Parallel_Split
inline constexpr std::uint8_t kAction = 1;   // Sequence, Parallel_Split
inline constexpr std::uint8_t kChannel = 0;  // Call (terminal)
inline constexpr std::uint8_t kNext = 1;     // Call
}  // namespace field

std::size_t field_count(Constructor c);

/// A macro function addressed as Channel.Function.
struct FunctionRef {
  std::string channel;
  std::string function;

  std::string str() const { return channel + "." + function; }
  static std::optional<FunctionRef> parse(std::string_view dotted);

  auto operator<=>(const FunctionRef&) const = default;
};

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct Node {
  Constructor ctor = Constructor::kWorkflow;
  NodeId parent = kNoNode;
  std::uint8_t parent_field = 0;
  std::array<std::vector<NodeId>, 2> children;
  // Terminal values of a Call; the channel is chosen before the function.
  std::string channel;
  std::string function;
};

/// Arena-backed ordered tree. Nodes are only ever appended, so NodeIds stay
/// valid for the lifetime of the tree; copying a tree is a deep copy.
class Tree {
 public:
  Tree() = default;

  NodeId add_root(Constructor ctor = Constructor::kWorkflow);
  NodeId add_child(NodeId parent, std::uint8_t field_index, Constructor ctor);
  void set_channel(NodeId call, std::string channel);
  void set_function(NodeId call, std::string function);
  // Deep-copies the subtree of `other` rooted at `other_node` under `parent`.
  NodeId graft(NodeId parent, std::uint8_t field_index, const Tree& other, NodeId other_node);

  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }
  NodeId root() const { return root_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }

  std::span<const NodeId> children(NodeId id, std::uint8_t field_index) const {
    return node(id).children.at(field_index);
  }
  // Navigation helpers; they return kNoNode for an absent optional value.
  NodeId root_pattern() const;
  NodeId trigger(NodeId pattern) const;
  std::span<const NodeId> actions(NodeId pattern) const;
  NodeId next(NodeId call) const;
  FunctionRef function_of(NodeId call) const;

  // Pattern node that owns this Call (through its trigger or action field).
  NodeId owning_pattern(NodeId call) const;
  // Number of pattern nodes from the root down to and including `pattern`.
  std::size_t pattern_level(NodeId pattern) const;
  // Maximum number of pattern nodes on any root-to-leaf path.
  std::size_t pattern_depth() const;

 private:
  std::vector<Node> nodes_;
  NodeId root_ = kNoNode;
};

bool structurally_equal(const Tree& a, NodeId na, const Tree& b, NodeId nb);

/// Fully-built workflow tree. Completeness is the caller's claim (see
/// to_wast()/validate_wast()); equality is structural and ignores node ids.
class Wast {
 public:
  Wast() = default;
  explicit Wast(Tree tree) : tree_(std::move(tree)) {}

  const Tree& tree() const { return tree_; }

  friend bool operator==(const Wast& a, const Wast& b) {
    if (a.tree_.empty() || b.tree_.empty()) return a.tree_.empty() && b.tree_.empty();
    return structurally_equal(a.tree_, a.tree_.root(), b.tree_, b.tree_.root());
  }

 private:
  Tree tree_;
};

// Functions in depth-first order (trigger, then actions with their chained
// subtrees), which is also the order in which they are selected.
std::vector<FunctionRef> functions_in_order(const Tree& tree);

// Lisp-ish rendering of the whole tree including empty optional slots, used
// for diagnostics and as a structural key.
std::string debug_string(const Tree& tree);

// Indented multi-line outline of the workflow (one line per node).
std::string outline(const Tree& tree);

/// Value-type description of a workflow used to build trees by hand and by
/// the enumerator and surface parser.
namespace expr {

struct Call;

struct Pattern {
  Constructor kind = Constructor::kSequence;
  std::vector<Call> trigger;  // zero or one
  std::vector<Call> actions;

  bool operator==(const Pattern&) const;
};

struct Call {
  FunctionRef function;
  std::vector<Pattern> next;  // zero or one

  bool operator==(const Call&) const;
};

Call call(std::string channel, std::string function);
Call call(std::string channel, std::string function, Pattern next);
Pattern sequence(Call trigger, Call action);
Pattern parallel_split(Call trigger, std::vector<Call> actions);
// Patterns reached through a Call's next field have no trigger of their own.
Pattern chained_sequence(Call action);
Pattern chained_split(std::vector<Call> actions);

Wast workflow(const Pattern& pattern);
void append_pattern(Tree& tree, NodeId parent, std::uint8_t field_index, const Pattern& p);
Pattern pattern_from_tree(const Tree& tree, NodeId pattern);

}  // namespace expr

}  // namespace wpg
