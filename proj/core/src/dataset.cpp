#include "wpg/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wpg/error.hpp"
#include "wpg/nlgen.hpp"
#include "wpg/random.hpp"
#include "wpg/surface.hpp"
#include "wpg/transition.hpp"

namespace wpg {

using nlohmann::ordered_json;

std::string_view to_string(AnnotationStatus status) {
  switch (status) {
    case AnnotationStatus::kGenerated: return "generated";
    case AnnotationStatus::kLabeled: return "labeled";
    case AnnotationStatus::kDescribed: return "described";
    case AnnotationStatus::kReviewed: return "reviewed";
  }
  return "";
}

std::optional<AnnotationStatus> annotation_status_from_string(std::string_view name) {
  for (auto s : {AnnotationStatus::kGenerated, AnnotationStatus::kLabeled, AnnotationStatus::kDescribed,
                 AnnotationStatus::kReviewed}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kUnassigned: return "unassigned";
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "";
}

std::optional<Split> split_from_string(std::string_view name) {
  for (auto s : {Split::kUnassigned, Split::kTrain, Split::kDev, Split::kTest}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string example_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "wf-%06zu", index);
  return buf;
}

namespace {

ordered_json config_to_json(const GenConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["max_depth"] = c.max_depth;
  j["max_branch"] = c.max_branch;
  j["p_extend"] = c.p_extend;
  j["p_split"] = c.p_split;
  return j;
}

GenConfig config_from_json(const ordered_json& j) {
  GenConfig c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.max_depth = j.at("max_depth").get<std::size_t>();
  c.max_branch = j.at("max_branch").get<std::size_t>();
  c.p_extend = j.at("p_extend").get<double>();
  c.p_split = j.at("p_split").get<double>();
  return c;
}

constexpr std::array<std::string_view, 8> kFields = {"id",    "nl",     "formal", "actions",
                                                     "label", "status", "split",  "provenance"};

}  // namespace

std::string to_json_line(const Example& e) {
  ordered_json j;
  j["id"] = e.id;
  j["nl"] = e.nl;
  j["formal"] = e.formal;
  j["actions"] = actions_to_text(e.actions);
  j["label"] = to_string(e.label);
  j["status"] = to_string(e.status);
  j["split"] = to_string(e.split);
  ordered_json prov;
  prov["generator"] = e.provenance.generator ? config_to_json(*e.provenance.generator) : ordered_json(nullptr);
  prov["template_version"] = e.provenance.template_version;
  j["provenance"] = std::move(prov);
  return j.dump();
}

Example example_from_json(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const ordered_json::exception& ex) {
    throw Error(ErrorCode::kMalformedRecord, std::string("invalid JSON: ") + ex.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kMalformedRecord, "record is not a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(kFields.begin(), kFields.end(), key) == kFields.end()) {
      throw Error(ErrorCode::kMalformedRecord, "unexpected field '" + key + "'");
    }
  }
  for (auto name : kFields) {
    if (!j.contains(name)) throw Error(ErrorCode::kMalformedRecord, "missing field '" + std::string(name) + "'");
  }
  Example e;
  try {
    e.id = j.at("id").get<std::string>();
    e.nl = j.at("nl").get<std::string>();
    e.formal = j.at("formal").get<std::string>();
    e.actions = text_to_actions(j.at("actions").get<std::vector<std::string>>());
    const auto label = usefulness_from_string(j.at("label").get<std::string>());
    const auto status = annotation_status_from_string(j.at("status").get<std::string>());
    const auto split = split_from_string(j.at("split").get<std::string>());
    if (!label || !status || !split) throw Error(ErrorCode::kMalformedRecord, "bad label, status or split value");
    e.label = *label;
    e.status = *status;
    e.split = *split;
    const auto& prov = j.at("provenance");
    if (!prov.at("generator").is_null()) e.provenance.generator = config_from_json(prov.at("generator"));
    e.provenance.template_version = prov.at("template_version").get<std::string>();
  } catch (const ordered_json::exception& ex) {
    throw Error(ErrorCode::kMalformedRecord, std::string("bad field: ") + ex.what());
  } catch (const Error& ex) {
    throw Error(ErrorCode::kMalformedRecord, ex.what());
  }
  if (e.id.empty()) throw Error(ErrorCode::kMalformedRecord, "empty id");
  return e;
}

Wast check_record(const Example& e, const Catalog& catalog) {
  Wast w;
  try {
    w = to_wast(replay(e.actions, catalog));
  } catch (const Error& ex) {
    throw Error(ErrorCode::kConsistency, e.id + ": actions do not replay: " + ex.what());
  }
  const std::string formal = to_formal_expression(w);
  if (formal != e.formal) {
    throw Error(ErrorCode::kConsistency, e.id + ": actions build '" + formal + "' but formal is '" + e.formal + "'");
  }
  return w;
}

void emit_records(const std::vector<Example>& examples, std::ostream& out) {
  for (const auto& e : examples) out << to_json_line(e) << '\n';
}

void emit_records(const std::vector<Example>& examples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  emit_records(examples, out);
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<Example> parse_records(std::string_view text, const Catalog* catalog) {
  std::vector<Example> out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    Example e;
    try {
      e = example_from_json(line);
      if (catalog != nullptr) check_record(e, *catalog);
    } catch (const Error& ex) {
      throw Error(ex.code(), "line " + std::to_string(line_no) + ": " + ex.what());
    }
    if (!seen.insert(e.id).second) {
      throw Error(ErrorCode::kDuplicateId, "line " + std::to_string(line_no) + ": duplicate id " + e.id);
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Example> load_records(const std::filesystem::path& path, const Catalog* catalog) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open dataset " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_records(buf.str(), catalog);
}

namespace {

// Largest-remainder apportionment of n items.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& r) {
  const std::array<double, 3> ratio = {r.train, r.dev, r.test};
  std::array<std::size_t, 3> size{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = ratio[i] * static_cast<double>(n);
    size[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[i] = exact - static_cast<double>(size[i]);
    assigned += size[i];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3, ++assigned) ++size[order[k]];
  while (assigned > n) {
    for (std::size_t i = 3; i-- > 0 && assigned > n;) {
      if (size[i] > 0) {
        --size[i];
        --assigned;
      }
    }
  }
  return size;
}

void assign(std::vector<Example*>& group, const SplitRatios& ratios, Rng& rng) {
  for (std::size_t i = group.size(); i > 1; --i) std::swap(group[i - 1], group[rng.below(i)]);
  const auto size = split_sizes(group.size(), ratios);
  std::size_t k = 0;
  for (std::size_t i = 0; i < size[0]; ++i) group[k++]->split = Split::kTrain;
  for (std::size_t i = 0; i < size[1]; ++i) group[k++]->split = Split::kDev;
  for (std::size_t i = 0; i < size[2]; ++i) group[k++]->split = Split::kTest;
}

}  // namespace

void split_dataset(std::vector<Example>& examples, const SplitRatios& ratios, std::uint64_t seed,
                   bool stratify_by_depth) {
  if (ratios.train < 0 || ratios.dev < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.dev + ratios.test - 1.0) > 1e-9) {
    throw Error(ErrorCode::kRatio, "split ratios must be non-negative and sum to 1");
  }
  Rng rng(seed);
  if (!stratify_by_depth) {
    std::vector<Example*> all;
    for (auto& e : examples) all.push_back(&e);
    assign(all, ratios, rng);
    return;
  }
  std::map<std::size_t, std::vector<Example*>> strata;
  for (auto& e : examples) strata[example_depth(e)].push_back(&e);
  for (auto& [depth, group] : strata) assign(group, ratios, rng);
}

std::size_t example_depth(const Example& e) { return replay_structure(e.actions).tree().pattern_depth(); }

DatasetStats compute_stats(const std::vector<Example>& examples) {
  DatasetStats s;
  for (auto l : {UsefulnessLabel::kA, UsefulnessLabel::kB, UsefulnessLabel::kC, UsefulnessLabel::kUnlabeled}) {
    s.by_label[std::string(to_string(l))] = 0;
  }
  for (auto st : {AnnotationStatus::kGenerated, AnnotationStatus::kLabeled, AnnotationStatus::kDescribed,
                  AnnotationStatus::kReviewed}) {
    s.by_status[std::string(to_string(st))] = 0;
  }
  for (auto sp : {Split::kTrain, Split::kDev, Split::kTest, Split::kUnassigned}) {
    s.by_split[std::string(to_string(sp))] = 0;
  }
  for (const auto& e : examples) {
    ++s.total;
    ++s.by_label[std::string(to_string(e.label))];
    ++s.by_status[std::string(to_string(e.status))];
    ++s.by_split[std::string(to_string(e.split))];
    const TransitionState st = replay_structure(e.actions);
    ++s.depth_histogram[st.tree().pattern_depth()];
    for (const auto& f : functions_in_order(st.tree())) ++s.function_frequency[f.str()];
  }
  return s;
}

std::string stats_to_json(const DatasetStats& stats) {
  ordered_json j;
  j["total"] = stats.total;
  j["by_label"] = stats.by_label;
  j["by_status"] = stats.by_status;
  j["by_split"] = stats.by_split;
  ordered_json depth = ordered_json::object();
  for (const auto& [d, n] : stats.depth_histogram) depth[std::to_string(d)] = n;
  j["depth_histogram"] = std::move(depth);
  j["function_frequency"] = stats.function_frequency;
  return j.dump(2);
}

Example make_example(std::string id, const Wast& w, const Catalog& catalog, std::optional<GenConfig> generator) {
  Example e;
  e.id = std::move(id);
  e.nl = fuse_descriptions(w, catalog);
  e.formal = to_formal_expression(w);
  e.actions = oracle_actions(w);
  e.provenance.generator = generator;
  e.provenance.template_version = std::string(kTemplateVersion);
  return e;
}

std::vector<Example> generate_examples(const Catalog& catalog, const GenConfig& base, std::size_t count,
                                       const CorpusOptions& options) {
  base.validate();
  options.templates.validate();
  std::set<std::string> seen(options.existing_formals.begin(), options.existing_formals.end());
  const std::size_t budget = options.max_attempts ? options.max_attempts : 50 * count + 100;
  std::vector<Example> out;
  for (std::size_t attempt = 0; out.size() < count && attempt < budget; ++attempt) {
    GenConfig cfg = base;
    cfg.seed = mix_seed(base.seed, attempt);
    Wast w;
    try {
      w = generate_workflow(catalog, cfg);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kExhaustedSearch) throw;
      if (options.on_skip) options.on_skip(cfg.seed, e);
      continue;
    }
    Example e = make_example(example_id(options.first_index + out.size()), w, catalog, cfg);
    if (options.dedupe && !seen.insert(e.formal).second) continue;
    ParaphraseOptions para = options.paraphrase;
    para.seed = mix_seed(para.seed, attempt);
    e.nl = fuse_descriptions(w, catalog, options.templates, para);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace wpg

