#pragma once

#include <cstdint>
#include <functional>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wpg/action.hpp"
#include "wpg/catalog.hpp"
#include "wpg/error.hpp"
#include "wpg/genflow.hpp"
#include "wpg/nlgen.hpp"

namespace wpg {

enum class AnnotationStatus { kGenerated, kLabeled, kDescribed, kReviewed };
enum class Split { kUnassigned, kTrain, kDev, kTest };

std::string_view to_string(AnnotationStatus status);
std::optional<AnnotationStatus> annotation_status_from_string(std::string_view name);
std::string_view to_string(Split split);
std::optional<Split> split_from_string(std::string_view name);

struct Provenance {
  std::optional<GenConfig> generator;  // absent for hand-written records
  std::string template_version;

  bool operator==(const Provenance&) const = default;
};

/// One (description, workflow) pair with its annotation state.
struct Example {
  std::string id;
  std::string nl;
  std::string formal;
  std::vector<Action> actions;
  UsefulnessLabel label = UsefulnessLabel::kUnlabeled;
  AnnotationStatus status = AnnotationStatus::kGenerated;
  Split split = Split::kUnassigned;
  Provenance provenance;

  bool operator==(const Example&) const = default;
};

std::string example_id(std::size_t index);  // "wf-000042"

// One JSON object, no trailing newline.
std::string to_json_line(const Example& e);
// Throws kMalformedRecord.
Example example_from_json(std::string_view line);

// Replays the actions and compares the formal text. Throws kConsistency.
Wast check_record(const Example& e, const Catalog& catalog);

void emit_records(const std::vector<Example>& examples, std::ostream& out);
void emit_records(const std::vector<Example>& examples, const std::filesystem::path& path);

/// Reads a JSONL dataset. Blank lines are skipped; malformed lines raise
/// kMalformedRecord naming the line, repeated ids kDuplicateId. With a
/// catalog every record is also replay-checked (kConsistency).
std::vector<Example> parse_records(std::string_view text, const Catalog* catalog = nullptr);
std::vector<Example> load_records(const std::filesystem::path& path, const Catalog* catalog = nullptr);

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

/// Shuffles by seed and assigns train/dev/test with largest-remainder sizes.
/// With `stratify_by_depth` the assignment is done per workflow depth.
/// Throws kRatio when ratios are negative or do not sum to 1.
void split_dataset(std::vector<Example>& examples, const SplitRatios& ratios, std::uint64_t seed,
                   bool stratify_by_depth = false);

// Pattern depth of the record's workflow, from a grammar-only replay.
std::size_t example_depth(const Example& e);

struct DatasetStats {
  std::size_t total = 0;
  std::map<std::string, std::size_t> by_label;
  std::map<std::string, std::size_t> by_status;
  std::map<std::string, std::size_t> by_split;
  std::map<std::size_t, std::size_t> depth_histogram;
  std::map<std::string, std::size_t> function_frequency;  // "Channel.Function" -> uses
};

DatasetStats compute_stats(const std::vector<Example>& examples);
std::string stats_to_json(const DatasetStats& stats);

// Builds a generated (unlabeled) record for a workflow: formal text,
// oracle actions and template NL.
Example make_example(std::string id, const Wast& w, const Catalog& catalog,
                     std::optional<GenConfig> generator = std::nullopt);

struct CorpusOptions {
  std::size_t first_index = 0;  // ids start at example_id(first_index)
  bool dedupe = true;           // keep only the first record per formal expression
  std::vector<std::string> existing_formals;
  TemplateSet templates;
  ParaphraseOptions paraphrase;
  std::size_t max_attempts = 0;  // 0: 50 per requested record + 100
  // Called for each draw whose generation failed; the draw is skipped.
  std::function<void(std::uint64_t seed, const Error&)> on_skip;
};

/// Draws up to `count` records with status generated and draft NL. Draw i
/// uses seed mix_seed(base.seed, i), stored in the record's provenance so
/// every record can be regenerated on its own. Stops early when the attempt
/// budget runs out.
std::vector<Example> generate_examples(const Catalog& catalog, const GenConfig& base, std::size_t count,
                                       const CorpusOptions& options = {});

}  // namespace wpg
