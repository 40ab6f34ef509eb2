#include "doctest.h"
#include "fixtures.hpp"
#include "wpg/error.hpp"
#include "wpg/genflow.hpp"
#include "wpg/surface.hpp"
#include "wpg/transition.hpp"

using namespace wpg;

namespace {

ErrorCode parse_error(std::string_view text) {
  try {
    parse_formal_expression(text, builtin_demo_catalog());
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse error for " << text);
  return ErrorCode::kIo;
}

}  // namespace

TEST_SUITE("surface") {
  TEST_CASE("running example serializes to the published expression") {
    CHECK(to_formal_expression(fixtures::w0()) == fixtures::kW0Formal);
    CHECK(parse_formal_expression(fixtures::kW0Formal, builtin_demo_catalog()) == fixtures::w0());
  }

  TEST_CASE("single TAP") {
    using namespace expr;
    const Wast w = workflow(sequence(call("Gmail", "New_Email_Received"), call("SMS", "Send_Text_to_Me")));
    CHECK(to_formal_expression(w) == "Sequence(Gmail.New_Email_Received, SMS.Send_Text_to_Me)");
  }

  TEST_CASE("root split keeps its trigger first") {
    using namespace expr;
    const Wast w = workflow(parallel_split(call("Gmail", "New_Email_Received"),
                                           {call("SMS", "Send_Text_to_Me"), call("Slack", "Post_Message")}));
    const std::string text = to_formal_expression(w);
    CHECK(text == "Parallel_Split(Gmail.New_Email_Received, SMS.Send_Text_to_Me, Slack.Post_Message)");
    CHECK(parse_formal_expression(text, builtin_demo_catalog()) == w);
  }

  TEST_CASE("whitespace between tokens is insignificant") {
    const std::string spaced =
        "  Sequence ( Android . Any_Missed_Phone ,\n Parallel_Split(Watson_API.Voice_to_Text,SMS.Send_Text_to_Me ,"
        "\tGoogle_Drive.Archive_Text_in_Spread_Sheet ) ) ";
    CHECK(parse_formal_expression(spaced, builtin_demo_catalog()) == fixtures::w0());
  }

  TEST_CASE("errors") {
    CHECK(parse_error("Sequence(Android.Any_Missed_Phone)") == ErrorCode::kArity);
    CHECK(parse_error("Parallel_Split(Gmail.New_Email_Received, SMS.Send_Text_to_Me)") == ErrorCode::kArity);
    CHECK(parse_error("Sequence(Android.Any_Missed_Phone, Watson_API.Voice_to_Text, SMS.Send_Text_to_Me)") ==
          ErrorCode::kArity);
    CHECK(parse_error("Sequence(Android.Any_Missed_Phone, Watson_API.Voice_to_Text") == ErrorCode::kLexical);
    CHECK(parse_error("Sequence(Android.Any_Missed_Phone; Watson_API.Voice_to_Text)") == ErrorCode::kLexical);
    CHECK(parse_error("Sequence(Nowhere.Any_Missed_Phone, Watson_API.Voice_to_Text)") == ErrorCode::kUnknownChannel);
    CHECK(parse_error("Sequence(Android.Nope, Watson_API.Voice_to_Text)") == ErrorCode::kUnknownFunction);
    CHECK(parse_error("Sequence(Android.Any_Missed_Phone, SMS.Send_Text_to_Me)") == ErrorCode::kDataFlow);
    CHECK(parse_error("") == ErrorCode::kLexical);
  }

  TEST_CASE("generated workflows round-trip through text and actions") {
    const Catalog& demo = builtin_demo_catalog();
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      GenConfig cfg;
      cfg.seed = seed;
      const Wast w = generate_workflow(demo, cfg);
      const std::string text = to_formal_expression(w);
      CAPTURE(text);
      CHECK(parse_formal_expression(text, demo) == w);
      CHECK(to_wast(replay(oracle_actions(w), demo)) == w);
    }
  }

  TEST_CASE("action text forms") {
    const auto actions = oracle_actions(fixtures::w0());
    const auto lines = actions_to_text(actions);
    CHECK(lines[0] == "ApplyConstr[Workflow]");
    CHECK(lines[3] == "SelectMacr[Android]");
    CHECK(lines[5] == "StopExpnsn");
    CHECK(text_to_actions(lines) == actions);
    CHECK_THROWS_AS(text_to_actions({"ApplyConstr[Nope]"}), Error);
    CHECK_THROWS_AS(text_to_actions({"SelectMacr[]"}), Error);
    CHECK_THROWS_AS(text_to_actions({"Stop"}), Error);

    const std::string blocks = format_action_blocks({actions, actions});
    const auto parsed = parse_action_blocks(blocks);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[1] == actions);
  }
}
