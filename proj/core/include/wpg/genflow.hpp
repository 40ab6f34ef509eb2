#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wpg/catalog.hpp"
#include "wpg/random.hpp"
#include "wpg/transition.hpp"
#include "wpg/tree.hpp"

namespace wpg {

/// Knobs of the random workflow generator.
struct GenConfig {
  std::uint64_t seed = 0;
  std::size_t max_depth = 3;   // pattern nodes on any root-to-leaf path, >= 1
  std::size_t max_branch = 3;  // actions per Parallel_Split, >= 2
  double p_extend = 0.5;       // chain (vertically) at an eligible action Call
  double p_split = 0.5;        // pick Parallel_Split over Sequence when extending
  std::size_t retries = 32;

  // Throws kInvalidConfig.
  void validate() const;
  Limits limits() const { return Limits{max_depth, max_branch}; }

  bool operator==(const GenConfig&) const = default;
};

// Human usefulness judgement attached during annotation; the generator
// always emits kUnlabeled.
enum class UsefulnessLabel { kA, kB, kC, kUnlabeled };

std::string_view to_string(UsefulnessLabel label);
std::optional<UsefulnessLabel> usefulness_from_string(std::string_view name);
// "convenient and frequently used", "possible to use", ...
std::string_view usefulness_meaning(UsefulnessLabel label);

/// Draws workflows by walking the transition system with a seeded policy:
/// a uniformly chosen trigger, vertical extension at action Calls with
/// probability p_extend, horizontal fan-out with probability p_split.
class WorkflowGenerator {
 public:
  WorkflowGenerator(const Catalog& catalog, GenConfig config);

  // Throws kExhaustedSearch after `retries` dead ends.
  Wast next();
  // Same draw, returning the action sequence that built it.
  std::vector<Action> next_actions();

 private:
  std::optional<std::vector<Action>> attempt();

  const Catalog& catalog_;
  GenConfig config_;
  Rng rng_;
};

Wast generate_workflow(const Catalog& catalog, const GenConfig& config);

/// Every valid workflow within the bounds, each exactly once, in a fixed
/// order. Built by direct recursion over the catalog (not through the
/// transition system) so it can serve as an independent oracle.
/// limits.max_depth must be > 0; max_branch == 0 leaves split arity bounded
/// only by the number of distinct candidates. Returns the count visited.
std::size_t enumerate_workflows(const Catalog& catalog, const Limits& limits,
                                const std::function<void(const Wast&)>& visit);
std::vector<Wast> enumerate_workflows(const Catalog& catalog, const Limits& limits);

// Shuffles the branches of every Parallel_Split (same workflow semantics).
Wast permute_parallel_branches(const Wast& w, std::uint64_t seed);

}  // namespace wpg
