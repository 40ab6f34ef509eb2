#include <algorithm>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "wpg/error.hpp"
#include "wpg/genflow.hpp"
#include "wpg/grammar.hpp"
#include "wpg/random.hpp"
#include "wpg/transition.hpp"

using namespace wpg;

TEST_SUITE("grammar") {
  TEST_CASE("builtin grammar has the four constructors") {
    const GrammarSpec& g = builtin_wpg();
    for (const char* c : {"Workflow", "Sequence", "Parallel_Split", "Call"}) CHECK(g.find_constructor(c) != nullptr);
    CHECK(g.constructors_of("stmt") == std::vector<std::string>{"Workflow"});
    CHECK(g.constructors_of("wpg") == std::vector<std::string>{"Sequence", "Parallel_Split"});
    const ConstructorDef* ps = g.find_constructor("Parallel_Split");
    REQUIRE(ps != nullptr);
    REQUIRE(ps->fields.size() == 2);
    CHECK(ps->fields[0].cardinality == Cardinality::kOptional);
    CHECK(ps->fields[1].cardinality == Cardinality::kSequential);
    CHECK(ps->signature() == "Parallel_Split(func? trigger, func* action)");
    CHECK(g.find_constructor("Call")->signature() == "Call(type channel, wpg? next)");
  }

  TEST_CASE("malformed grammars are rejected") {
    auto bad = [](std::vector<TypeDef> types, std::string root) {
      try {
        GrammarSpec g(std::move(types), std::move(root));
      } catch (const Error& e) {
        return e.code() == ErrorCode::kInvalidGrammar;
      }
      return false;
    };
    const TypeDef term{"type", {}, true, {}};
    CHECK(bad({TypeDef{"stmt", {ConstructorDef{"W", {FieldDef{"x", "nope", Cardinality::kSingle}}}}, false, {}}, term},
              "stmt"));
    CHECK(bad({TypeDef{"stmt", {}, false, {}}, term}, "stmt"));
    CHECK(bad({TypeDef{"stmt", {ConstructorDef{"W", {FieldDef{"x", "type", Cardinality::kSingle},
                                                     FieldDef{"x", "type", Cardinality::kSingle}}}},
                       false, {}},
               term},
              "stmt"));
    CHECK(bad({term}, "stmt"));
  }

  TEST_CASE("with_catalog fills the terminal type with channels") {
    const GrammarSpec g = builtin_wpg().with_catalog(fixtures::figure_catalog());
    const TypeDef* t = g.find_type("type");
    REQUIRE(t != nullptr);
    CHECK(t->terminals == std::vector<std::string>{"Android", "Watson_API", "SMS", "Google_Drive"});
    CHECK(is_builtin_wpg(g));
  }
}

TEST_SUITE("transition") {
  TEST_CASE("expansion table of the running example") {
    const Wast w = fixtures::w0();
    const auto actions = oracle_actions(w);
    const auto& table = fixtures::expansion_table();
    REQUIRE(actions.size() == table.size());

    TransitionState s = init_state();
    for (std::size_t t = 0; t < actions.size(); ++t) {
      CAPTURE(t + 1);
      CHECK(frontier_label(s, s.front()) == table[t].frontier);
      CHECK(pretty_action(actions[t]) == table[t].action);
      apply_action_in_place(s, actions[t], builtin_demo_catalog());
    }
    CHECK(s.complete());
    CHECK(to_wast(s) == w);

    std::size_t apply = 0, select = 0, stop = 0;
    for (const auto& a : actions) {
      apply += a.kind == Action::Kind::kApplyConstr;
      select += a.kind == Action::Kind::kSelectMacr;
      stop += a.kind == Action::Kind::kStopExpnsn;
    }
    CHECK(apply == 7);
    CHECK(select == 8);
    CHECK(stop == 5);
    CHECK(actions[9].text() == "ApplyConstr[Parallel_Split]");
    CHECK(actions[10].text() == "StopExpnsn");
  }

  TEST_CASE("per-step legal counts of the running example on its own functions") {
    // Worked by hand: only the chained pattern (Stop/Sequence/Parallel_Split)
    // and the first split channel (SMS or Google_Drive) are real choices.
    const std::vector<std::size_t> expected = {1, 1, 1, 1, 1, 1, 1, 1, 1, 3, 1, 1, 2, 1, 1, 1, 1, 1, 1, 1};
    TransitionState s = init_state();
    const auto actions = oracle_actions(fixtures::w0());
    for (std::size_t t = 0; t < actions.size(); ++t) {
      CAPTURE(t + 1);
      CHECK(legal_actions(s, fixtures::figure_catalog()).size() == expected[t]);
      apply_action_in_place(s, actions[t], fixtures::figure_catalog());
    }
  }

  TEST_CASE("initial state and first expansions") {
    TransitionState s = init_state();
    CHECK(s.step() == 0);
    CHECK(frontier_label(s, s.front()) == "stmt root");
    CHECK(legal_actions(s, builtin_demo_catalog()) == std::vector<Action>{Action::apply(Constructor::kWorkflow)});
    apply_action_in_place(s, Action::apply(Constructor::kWorkflow), builtin_demo_catalog());
    CHECK(legal_actions(s, builtin_demo_catalog()) ==
          std::vector<Action>{Action::apply(Constructor::kSequence), Action::apply(Constructor::kParallelSplit)});
    CHECK_THROWS_AS(init_state(GrammarSpec({TypeDef{"type", {}, true, {}},
                                            TypeDef{"stmt", {ConstructorDef{"X", {}}}, false, {}}},
                                           "stmt")),
                    Error);
  }

  TEST_CASE("chained trigger slot only closes") {
    TransitionState s = init_state();
    const auto actions = oracle_actions(fixtures::w0());
    for (std::size_t t = 0; t < 10; ++t) apply_action_in_place(s, actions[t], builtin_demo_catalog());
    CHECK(frontier_label(s, s.front()) == "func? trigger");
    const auto legal = legal_actions(s, builtin_demo_catalog());
    CHECK(std::find(legal.begin(), legal.end(), Action::stop()) != legal.end());
    CHECK(legal.size() == 1);
  }

  TEST_CASE("channel slot after a text producer offers only text-accepting channels") {
    const Catalog& demo = builtin_demo_catalog();
    std::set<std::string> expected;
    for (const auto& ch : demo.channels()) {
      for (const auto& fn : ch.functions) {
        if (fn.can_act() && fn.input_kind == DataKind::kText) expected.insert(ch.name);
      }
    }
    // Root action after a text trigger (data kinds only).
    TransitionState s = init_state();
    for (const char* a : {"ApplyConstr[Workflow]", "ApplyConstr[Sequence]", "ApplyConstr[Call]", "SelectMacr[Gmail]",
                          "SelectMacr[New_Email_Received]", "StopExpnsn", "ApplyConstr[Call]"}) {
      apply_action_in_place(s, Action::parse(a), demo);
    }
    std::set<std::string> got;
    for (const auto& a : legal_actions(s, demo)) got.insert(a.token);
    CHECK(got == expected);

    // Chain edge after Voice_to_Text when kinds alone decide.
    const Catalog kind = demo.with_mode(ChainMode::kKindFallback);
    TransitionState c = init_state();
    for (const char* a : {"ApplyConstr[Workflow]", "ApplyConstr[Sequence]", "ApplyConstr[Call]", "SelectMacr[Android]",
                          "SelectMacr[Any_Missed_Phone]", "StopExpnsn", "ApplyConstr[Call]", "SelectMacr[Watson_API]",
                          "SelectMacr[Voice_to_Text]", "ApplyConstr[Sequence]", "StopExpnsn", "ApplyConstr[Call]"}) {
      apply_action_in_place(c, Action::parse(a), kind);
    }
    got.clear();
    for (const auto& a : legal_actions(c, kind)) got.insert(a.token);
    CHECK(got == expected);
  }

  TEST_CASE("illegal actions are rejected with the slot named") {
    TransitionState s = init_state();
    try {
      apply_action_in_place(s, Action::apply(Constructor::kSequence), builtin_demo_catalog());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kIllegalAction);
      CHECK(std::string(e.what()).find("stmt root") != std::string::npos);
    }
    apply_action_in_place(s, Action::apply(Constructor::kWorkflow), builtin_demo_catalog());
    apply_action_in_place(s, Action::apply(Constructor::kSequence), builtin_demo_catalog());
    // Root trigger cannot be left empty.
    CHECK_THROWS_AS(apply_action(s, Action::stop(), builtin_demo_catalog()), Error);
    // Sequence's single action cannot be closed.
    TransitionState full = replay(oracle_actions(fixtures::w0()), builtin_demo_catalog());
    CHECK_THROWS_AS(legal_actions(full, builtin_demo_catalog()), Error);
    CHECK_THROWS_AS(apply_action(full, Action::stop(), builtin_demo_catalog()), Error);
  }

  TEST_CASE("to_wast refuses incomplete states") {
    TransitionState s = init_state();
    CHECK_THROWS_AS(to_wast(s), Error);
  }

  TEST_CASE("random legal walks keep every invariant") {
    const Catalog& demo = builtin_demo_catalog();
    const Limits limits{4, 3};
    Rng rng(11);
    std::size_t steps = 0, completed = 0;
    TransitionState s = init_state();
    while (steps < 3000) {
      const auto legal = legal_actions(s, demo, limits);
      REQUIRE(!legal.empty());
      apply_action_in_place(s, legal[rng.below(legal.size())], demo, limits);
      ++steps;
      const auto problems = check_state_invariants(s, limits);
      REQUIRE_MESSAGE(problems.empty(), problems.front());
      if (s.complete()) {
        const Wast w = to_wast(s);
        const auto v = validate_wast(w, demo, limits);
        REQUIRE_MESSAGE(v.empty(), v.front().message);
        CHECK(oracle_actions(w).size() == s.step());
        ++completed;
        s = init_state();
      }
    }
    CHECK(completed > 50);
  }
}

TEST_SUITE("validate") {
  TEST_CASE("running example is valid") { CHECK(validate_wast(fixtures::w0(), builtin_demo_catalog()).empty()); }

  TEST_CASE("single-action split violates arity") {
    using namespace expr;
    const Wast w = workflow(parallel_split(call("Gmail", "New_Email_Received"), {call("SMS", "Send_Text_to_Me")}));
    const auto v = validate_wast(w, builtin_demo_catalog());
    REQUIRE(!v.empty());
    CHECK(v.front().message.find("sequential arity < 2") != std::string::npos);
    CHECK_THROWS_AS(oracle_actions(w), Error);
  }

  TEST_CASE("chaining from a function without output") {
    using namespace expr;
    const Wast w = workflow(sequence(
        call("Gmail", "New_Email_Received"),
        call("SMS", "Send_Text_to_Me", chained_sequence(call("Google_Drive", "Archive_Text_in_Spread_Sheet")))));
    const auto v = validate_wast(w, builtin_demo_catalog());
    REQUIRE(v.size() == 1);
    CHECK(v.front().message.find("no return value") != std::string::npos);
  }

  TEST_CASE("other violations") {
    using namespace expr;
    const Catalog& demo = builtin_demo_catalog();
    // Trigger used as an action.
    CHECK(!validate_wast(workflow(sequence(call("Gmail", "New_Email_Received"), call("Slack", "New_Mention"))), demo)
               .empty());
    // Kind mismatch on the TAP edge.
    CHECK(!validate_wast(workflow(sequence(call("Android", "Any_Missed_Phone"), call("SMS", "Send_Text_to_Me"))), demo)
               .empty());
    // Unknown function.
    CHECK(!validate_wast(workflow(sequence(call("Gmail", "Nope"), call("SMS", "Send_Text_to_Me"))), demo).empty());
    // Duplicate split branch.
    CHECK(!validate_wast(workflow(parallel_split(call("Gmail", "New_Email_Received"),
                                                 {call("SMS", "Send_Text_to_Me"), call("SMS", "Send_Text_to_Me")})),
                         demo)
               .empty());
    // Chained pattern with its own trigger.
    Pattern dup = chained_sequence(call("SMS", "Send_Text_to_Me"));
    dup.trigger.push_back(call("Gmail", "New_Email_Received"));
    CHECK(!validate_wast(workflow(sequence(call("Android", "Any_Missed_Phone"), call("Watson_API", "Voice_to_Text", dup))),
                         demo)
               .empty());
    // Depth cap.
    const Wast deep = workflow(sequence(
        call("Android", "Any_Missed_Phone"),
        call("Watson_API", "Voice_to_Text", chained_sequence(call("Watson_API", "Translate_Text",
                                                                  chained_sequence(call("SMS", "Send_Text_to_Me")))))));
    CHECK(validate_wast(deep, demo).empty());
    CHECK(!validate_wast(deep, demo, Limits{2, 0}).empty());
  }
}
