#include <filesystem>
#include <map>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "wpg/dataset.hpp"
#include "wpg/error.hpp"
#include "wpg/genflow.hpp"
#include "wpg/surface.hpp"
#include "wpg/transition.hpp"

using namespace wpg;

namespace {

std::vector<Example> generated(std::size_t n, std::uint64_t seed = 3) {
  std::vector<Example> out;
  GenConfig cfg;
  for (std::size_t i = 0; i < n; ++i) {
    cfg.seed = mix_seed(seed, i);
    out.push_back(make_example(example_id(i), generate_workflow(builtin_demo_catalog(), cfg),
                               builtin_demo_catalog(), cfg));
  }
  return out;
}

ErrorCode load_error(const std::string& text, const Catalog* catalog = nullptr) {
  try {
    parse_records(text, catalog);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a load error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("record of the running example") {
    const Example e = make_example("wf-000000", fixtures::w0(), builtin_demo_catalog());
    CHECK(e.formal == fixtures::kW0Formal);
    CHECK(e.nl == fixtures::kW0Nl);
    CHECK(e.actions.size() == 20);
    CHECK(e.status == AnnotationStatus::kGenerated);
    CHECK(e.label == UsefulnessLabel::kUnlabeled);
    CHECK(check_record(e, builtin_demo_catalog()) == fixtures::w0());
    const std::string line = to_json_line(e);
    CHECK(line.rfind(R"({"id":"wf-000000","nl":)", 0) == 0);
    CHECK(example_from_json(line) == e);
  }

  TEST_CASE("emit and load round-trip") {
    auto records = generated(1000);
    records[3].label = UsefulnessLabel::kB;
    records[3].status = AnnotationStatus::kReviewed;
    records[4].split = Split::kTest;
    records[5].provenance.generator.reset();
    std::ostringstream out;
    emit_records(records, out);
    CHECK(parse_records(out.str(), &builtin_demo_catalog()) == records);

    const auto path = std::filesystem::temp_directory_path() / "wpg_dataset_roundtrip.jsonl";
    emit_records(records, path);
    CHECK(load_records(path, &builtin_demo_catalog()) == records);
    std::filesystem::remove(path);
  }

  TEST_CASE("empty input") {
    CHECK(parse_records("").empty());
    CHECK(parse_records("\n\n").empty());
  }

  TEST_CASE("load errors carry the line number") {
    const auto records = generated(3);
    const std::string good = to_json_line(records[0]) + "\n" + to_json_line(records[1]) + "\n";
    try {
      parse_records(good + "{broken\n");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kMalformedRecord);
      CHECK(std::string(e.what()).rfind("line 3:", 0) == 0);
    }
    CHECK(load_error(good + to_json_line(records[0]) + "\n") == ErrorCode::kDuplicateId);
    CHECK(load_error(R"({"id":"x"})") == ErrorCode::kMalformedRecord);

    Example extra = records[2];
    std::string line = to_json_line(extra);
    line.insert(line.size() - 1, R"(,"extra":1)");
    CHECK(load_error(line) == ErrorCode::kMalformedRecord);

    Example broken = records[2];
    broken.actions.pop_back();
    CHECK(load_error(to_json_line(broken), &builtin_demo_catalog()) == ErrorCode::kConsistency);
    Example mislabeled = records[2];
    mislabeled.formal = fixtures::kW0Formal;
    CHECK(load_error(to_json_line(mislabeled), &builtin_demo_catalog()) == ErrorCode::kConsistency);
    // Without a catalog the replay check is skipped.
    CHECK(parse_records(to_json_line(mislabeled)).size() == 1);
  }

  TEST_CASE("split sizes") {
    auto records = generated(10);
    split_dataset(records, {0.8, 0.1, 0.1}, 1);
    const DatasetStats s = compute_stats(records);
    CHECK(s.by_split.at("train") == 8);
    CHECK(s.by_split.at("dev") == 1);
    CHECK(s.by_split.at("test") == 1);
    CHECK(s.by_split.at("unassigned") == 0);

    auto again = generated(10);
    split_dataset(again, {0.8, 0.1, 0.1}, 1);
    CHECK(again == records);

    CHECK_THROWS_AS(split_dataset(records, {0.8, 0.1, 0.2}, 1), Error);
    CHECK_THROWS_AS(split_dataset(records, {1.1, -0.1, 0.0}, 1), Error);
  }

  TEST_CASE("split sizes stay within one of the ratio") {
    for (std::size_t n : {1u, 2u, 7u, 33u, 101u}) {
      auto records = generated(n);
      split_dataset(records, {0.7, 0.2, 0.1}, n);
      const DatasetStats s = compute_stats(records);
      CHECK(std::abs(static_cast<double>(s.by_split.at("train")) - 0.7 * n) <= 1.0);
      CHECK(std::abs(static_cast<double>(s.by_split.at("dev")) - 0.2 * n) <= 1.0);
      CHECK(std::abs(static_cast<double>(s.by_split.at("test")) - 0.1 * n) <= 1.0);
      CHECK(s.by_split.at("train") + s.by_split.at("dev") + s.by_split.at("test") == n);
    }
  }

  TEST_CASE("stratified split") {
    auto records = generated(300);
    split_dataset(records, {0.6, 0.2, 0.2}, 9, true);
    std::map<std::size_t, std::map<Split, std::size_t>> per_depth;
    std::map<std::size_t, std::size_t> totals;
    for (const auto& e : records) {
      const std::size_t d = replay(e.actions, builtin_demo_catalog()).tree().pattern_depth();
      ++per_depth[d][e.split];
      ++totals[d];
    }
    for (const auto& [d, counts] : per_depth) {
      const double n = static_cast<double>(totals[d]);
      CHECK(std::abs(static_cast<double>(counts.count(Split::kTrain) ? counts.at(Split::kTrain) : 0) - 0.6 * n) <= 1.0);
      CHECK(std::abs(static_cast<double>(counts.count(Split::kDev) ? counts.at(Split::kDev) : 0) - 0.2 * n) <= 1.0);
      CHECK(std::abs(static_cast<double>(counts.count(Split::kTest) ? counts.at(Split::kTest) : 0) - 0.2 * n) <= 1.0);
    }
  }

  TEST_CASE("stats") {
    auto records = generated(3);
    records[0].label = UsefulnessLabel::kA;
    records[1].label = UsefulnessLabel::kA;
    records[2].label = UsefulnessLabel::kB;
    const DatasetStats s = compute_stats(records);
    CHECK(s.total == 3);
    CHECK(s.by_label.at("A") == 2);
    CHECK(s.by_label.at("B") == 1);
    CHECK(s.by_label.at("C") == 0);
    CHECK(s.by_status.at("generated") == 3);

    const DatasetStats empty = compute_stats({});
    CHECK(empty.total == 0);
    CHECK(empty.by_label.at("A") == 0);
    CHECK(empty.depth_histogram.empty());
  }

  TEST_CASE("depth histogram and function counts match a recount") {
    std::vector<Example> records;
    std::map<std::size_t, std::size_t> depth;
    std::map<std::string, std::size_t> uses;
    for (const auto& w : enumerate_workflows(builtin_demo_catalog(), Limits{2, 3})) {
      records.push_back(make_example(example_id(records.size()), w, builtin_demo_catalog()));
      // Recount from the formal text: nesting of '(' is the pattern depth.
      std::size_t d = 0, cur = 0;
      for (char c : records.back().formal) {
        if (c == '(') d = std::max(d, ++cur);
        if (c == ')') --cur;
      }
      ++depth[d];
      std::string text = records.back().formal;
      for (char& c : text) {
        if (c == '(' || c == ')' || c == ',') c = ' ';
      }
      std::istringstream in(text);
      for (std::string tok; in >> tok;) {
        if (tok.find('.') != std::string::npos) ++uses[tok];
      }
    }
    const DatasetStats s = compute_stats(records);
    CHECK(s.depth_histogram == depth);
    CHECK(s.function_frequency == uses);
    std::size_t sum = 0;
    for (const auto& [d, n] : s.depth_histogram) sum += n;
    CHECK(sum == s.total);
  }
}
