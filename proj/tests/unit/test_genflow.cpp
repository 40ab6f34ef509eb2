#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "wpg/error.hpp"
#include "wpg/genflow.hpp"
#include "wpg/surface.hpp"
#include "wpg/transition.hpp"

using namespace wpg;

namespace {

std::size_t max_split_arity(const Tree& t) {
  std::size_t best = 0;
  for (NodeId id = 0; id < t.size(); ++id) {
    if (t.node(id).ctor == Constructor::kParallelSplit) best = std::max(best, t.actions(id).size());
  }
  return best;
}

std::size_t min_split_arity(const Tree& t) {
  std::size_t best = SIZE_MAX;
  for (NodeId id = 0; id < t.size(); ++id) {
    if (t.node(id).ctor == Constructor::kParallelSplit) best = std::min(best, t.actions(id).size());
  }
  return best;
}

// Every complete workflow reachable by legal actions (depth-first).
void dfs(const TransitionState& s, const Catalog& c, const Limits& limits, std::set<std::string>& out) {
  if (s.complete()) {
    out.insert(to_formal_expression(to_wast(s)));
    return;
  }
  for (const auto& a : legal_actions(s, c, limits)) dfs(apply_action(s, a, c, limits), c, limits, out);
}

}  // namespace

TEST_SUITE("genflow") {
  TEST_CASE("generated workflows are valid and bounded") {
    const Catalog& demo = builtin_demo_catalog();
    bool saw_sequence_only = false, saw_split = false;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      GenConfig cfg;
      cfg.seed = seed;
      const Wast w = generate_workflow(demo, cfg);
      const auto v = validate_wast(w, demo, cfg.limits());
      REQUIRE_MESSAGE(v.empty(), v.front().message);
      CHECK(w.tree().pattern_depth() <= cfg.max_depth);
      const std::size_t hi = max_split_arity(w.tree());
      CHECK(hi <= cfg.max_branch);
      if (hi == 0) {
        saw_sequence_only = true;
      } else {
        saw_split = true;
        CHECK(min_split_arity(w.tree()) >= 2);
      }
    }
    CHECK(saw_sequence_only);
    CHECK(saw_split);
  }

  TEST_CASE("same seed, same workflow") {
    GenConfig cfg;
    cfg.seed = 42;
    CHECK(generate_workflow(builtin_demo_catalog(), cfg) == generate_workflow(builtin_demo_catalog(), cfg));
    WorkflowGenerator a(builtin_demo_catalog(), cfg), b(builtin_demo_catalog(), cfg);
    for (int i = 0; i < 20; ++i) CHECK(a.next_actions() == b.next_actions());
  }

  TEST_CASE("extension probabilities at the extremes") {
    GenConfig flat;
    flat.p_extend = 0.0;
    flat.p_split = 0.0;
    GenConfig wide;
    wide.p_extend = 1.0;
    wide.p_split = 1.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      flat.seed = wide.seed = seed;
      const Wast f = generate_workflow(builtin_demo_catalog(), flat);
      CHECK(f.tree().pattern_depth() == 1);
      CHECK(max_split_arity(f.tree()) == 0);
      const Wast w = generate_workflow(builtin_demo_catalog(), wide);
      CHECK(validate_wast(w, builtin_demo_catalog(), wide.limits()).empty());
    }
  }

  TEST_CASE("config validation") {
    GenConfig c;
    c.p_split = 1.5;
    CHECK_THROWS_AS(c.validate(), Error);
    c = GenConfig{};
    c.max_branch = 1;
    CHECK_THROWS_AS(c.validate(), Error);
    c = GenConfig{};
    c.max_depth = 0;
    CHECK_THROWS_AS(WorkflowGenerator(builtin_demo_catalog(), c), Error);
  }

  TEST_CASE("no trigger with a successor means exhausted search") {
    const Catalog lonely({Channel{"A", "", {MacroFunction{"A", "t", Capability::kTrigger, DataKind::kNone,
                                                          DataKind::kText, "t"},
                                            MacroFunction{"A", "a", Capability::kAction, DataKind::kFile,
                                                          DataKind::kNone, "a"}}}},
                         {});
    try {
      generate_workflow(lonely, GenConfig{});
      FAIL("expected exhausted search");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kExhaustedSearch);
    }
  }

  TEST_CASE("enumeration of the running example's functions") {
    const auto all = enumerate_workflows(fixtures::figure_catalog(), Limits{2, 3});
    std::set<std::string> texts;
    for (const auto& w : all) texts.insert(to_formal_expression(w));
    CHECK(all.size() == 5);
    CHECK(texts.size() == 5);
    CHECK(texts.contains(fixtures::kW0Formal));
    CHECK(texts.contains("Sequence(Android.Any_Missed_Phone, Watson_API.Voice_to_Text)"));
  }

  TEST_CASE("enumeration equals exhaustive search over legal actions") {
    for (const Limits limits : {Limits{1, 3}, Limits{2, 2}, Limits{2, 3}}) {
      for (ChainMode mode : {ChainMode::kStrict, ChainMode::kKindFallback}) {
        const Catalog c = builtin_demo_catalog().with_mode(mode);
        std::set<std::string> by_enum;
        std::size_t visited = enumerate_workflows(c, limits, [&](const Wast& w) {
          CHECK(validate_wast(w, c, limits).empty());
          by_enum.insert(to_formal_expression(w));
        });
        CHECK(visited == by_enum.size());
        std::set<std::string> by_dfs;
        dfs(init_state(), c, limits, by_dfs);
        CAPTURE(limits.max_depth);
        CAPTURE(limits.max_branch);
        CHECK(by_enum == by_dfs);
      }
    }
  }

  TEST_CASE("labels") {
    CHECK(to_string(UsefulnessLabel::kA) == "A");
    CHECK(usefulness_from_string("C") == UsefulnessLabel::kC);
    CHECK(usefulness_from_string("Unlabeled") == UsefulnessLabel::kUnlabeled);
    CHECK(!usefulness_from_string("D"));
    CHECK(usefulness_meaning(UsefulnessLabel::kA) == "convenient and frequently used");
    CHECK(usefulness_meaning(UsefulnessLabel::kB) == "possible to use");
    CHECK(usefulness_meaning(UsefulnessLabel::kC) == "inconvenient and not used");
  }

  TEST_CASE("branch permutation keeps the workflow valid") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      GenConfig cfg;
      cfg.seed = seed;
      cfg.p_split = 0.9;
      const Wast w = generate_workflow(builtin_demo_catalog(), cfg);
      const Wast p = permute_parallel_branches(w, seed);
      CHECK(validate_wast(p, builtin_demo_catalog(), cfg.limits()).empty());
      auto a = functions_in_order(w.tree());
      auto b = functions_in_order(p.tree());
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      CHECK(a == b);
    }
  }
}
