#include <filesystem>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "wpg/catalog.hpp"
#include "wpg/error.hpp"

using namespace wpg;

namespace {

ErrorCode catalog_error(const std::string& text) {
  try {
    parse_catalog(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a catalog error");
  return ErrorCode::kIo;
}

std::string one_channel(const std::string& functions, const std::string& rules = "[]") {
  return R"({"version": 1, "channels": [{"name": "A", "description": "", "functions": )" + functions +
         R"(}], "chain_rules": )" + rules + "}";
}

}  // namespace

TEST_SUITE("catalog") {
  TEST_CASE("demo catalog shape") {
    const Catalog& demo = builtin_demo_catalog();
    CHECK(demo.channels().size() >= 8);
    for (const auto& ref : example_workflow_functions()) CHECK(demo.find(ref) != nullptr);
    CHECK(demo.find("Android", "Any_Missed_Phone")->can_trigger());
    CHECK(!demo.find("SMS", "Send_Text_to_Me")->can_trigger());
    CHECK(demo.find_channel("Nope") == nullptr);
  }

  TEST_CASE("save and load round-trip") {
    const Catalog& demo = builtin_demo_catalog();
    const std::string text = save_catalog(demo);
    const Catalog back = parse_catalog(text);
    CHECK(back == demo);
    CHECK(save_catalog(back) == text);

    const auto path = std::filesystem::temp_directory_path() / "wpg_catalog_roundtrip.json";
    save_catalog(demo, path);
    CHECK(load_catalog(path) == demo);
    std::filesystem::remove(path);
  }

  TEST_CASE("shipped catalog file matches the builtin one") {
    const Catalog file = load_catalog(std::filesystem::path(WPG_DATA_DIR) / "demo_catalog.json");
    CHECK(file == builtin_demo_catalog());
  }

  TEST_CASE("malformed catalogs") {
    CHECK(catalog_error("{") == ErrorCode::kCatalogParse);
    CHECK(catalog_error(R"({"channels": [], "chain_rules": []})") == ErrorCode::kCatalogParse);
    CHECK(catalog_error(R"({"version": 9, "channels": [], "chain_rules": []})") == ErrorCode::kCatalogParse);
    CHECK(catalog_error(one_channel(
              R"([{"name": "f", "capability": "action", "input_kind": "blob", "output_kind": "none", "phrase": "x"}])")) ==
          ErrorCode::kCatalogParse);
    CHECK(catalog_error(one_channel(
              R"([{"name": "f", "capability": "action", "input_kind": "text", "output_kind": "none", "phrase": "x"},
                  {"name": "f", "capability": "action", "input_kind": "text", "output_kind": "none", "phrase": "y"}])")) ==
          ErrorCode::kCatalogParse);
  }

  TEST_CASE("dangling rule and capability violations") {
    const std::string fns =
        R"([{"name": "t", "capability": "trigger", "input_kind": "none", "output_kind": "text", "phrase": "t"},
            {"name": "a", "capability": "action", "input_kind": "text", "output_kind": "text", "phrase": "a"},
            {"name": "b", "capability": "action", "input_kind": "text", "output_kind": "none", "phrase": "b"}])";
    CHECK_NOTHROW(parse_catalog(one_channel(fns, R"([{"from": "A.a", "to": "A.b"}])")));
    CHECK(catalog_error(one_channel(fns, R"([{"from": "A.a", "to": "A.zzz"}])")) == ErrorCode::kDanglingReference);
    CHECK(catalog_error(one_channel(fns, R"([{"from": "A.t", "to": "A.b"}])")) == ErrorCode::kCapabilityViolation);
    CHECK(catalog_error(one_channel(fns, R"([{"from": "A.b", "to": "A.a"}])")) == ErrorCode::kCapabilityViolation);
    CHECK(catalog_error(one_channel(
              R"([{"name": "t", "capability": "trigger", "input_kind": "text", "output_kind": "text", "phrase": "t"}])")) ==
          ErrorCode::kCapabilityViolation);
  }

  TEST_CASE("chainable agrees with a brute-force reading of the rules") {
    const Catalog& demo = builtin_demo_catalog();
    std::set<std::pair<FunctionRef, FunctionRef>> rules;
    for (const auto& r : demo.rules()) rules.insert({r.from, r.to});
    const Catalog kind = demo.with_mode(ChainMode::kKindFallback);
    for (FunctionId f = 0; f < demo.function_count(); ++f) {
      for (FunctionId g = 0; g < demo.function_count(); ++g) {
        const MacroFunction& a = demo.function(f);
        const MacroFunction& b = demo.function(g);
        const bool both_act = a.can_act() && b.can_act();
        const bool kinds = a.output_kind != DataKind::kNone && a.output_kind == b.input_kind;
        CHECK(demo.chainable(a, b) == (both_act && rules.contains({a.ref(), b.ref()})));
        CHECK(kind.chainable(a, b) == (both_act && (kinds || rules.contains({a.ref(), b.ref()}))));
      }
    }
    // Rules never contradict the data kinds.
    for (const auto& r : demo.rules()) {
      CHECK(kinds_compatible(demo.find(r.from)->output_kind, demo.find(r.to)->input_kind));
    }
  }

  TEST_CASE("successor tables") {
    const Catalog& demo = builtin_demo_catalog();
    const FunctionId missed = *demo.find_id({"Android", "Any_Missed_Phone"});
    const auto& tap = demo.tap_successors(missed);
    REQUIRE(tap.size() == 1);
    CHECK(demo.function(tap[0]).ref() == FunctionRef{"Watson_API", "Voice_to_Text"});
    const FunctionId v2t = tap[0];
    std::set<std::string> strict;
    for (FunctionId g : demo.chain_successors(v2t)) strict.insert(demo.function(g).ref().str());
    CHECK(strict.contains("SMS.Send_Text_to_Me"));
    CHECK(strict.contains("Google_Drive.Archive_Text_in_Spread_Sheet"));
    CHECK(!strict.contains("Dropbox.Save_Text_File"));
    std::set<std::string> loose;
    const Catalog kind = demo.with_mode(ChainMode::kKindFallback);
    for (FunctionId g : kind.chain_successors(v2t)) loose.insert(kind.function(g).ref().str());
    CHECK(loose.contains("Dropbox.Save_Text_File"));
  }

  TEST_CASE("restriction keeps the rules among kept functions") {
    const Catalog& fig = fixtures::figure_catalog();
    CHECK(fig.function_count() == 4);
    CHECK(fig.channels().size() == 4);
    CHECK(fig.rules().size() == 2);
  }

  TEST_CASE("enum names") {
    CHECK(data_kind_from_string("text") == DataKind::kText);
    CHECK(!data_kind_from_string("blob"));
    CHECK(capability_from_string("both") == Capability::kBoth);
    CHECK(chain_mode_from_string("kind") == ChainMode::kKindFallback);
    CHECK(to_string(ChainMode::kStrict) == "strict");
  }
}
