#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "wpg/catalog.hpp"
#include "wpg/tree.hpp"

namespace wpg {

enum class Role { kTrigger, kAction };

struct Connectives {
  std::string first = "then";
  std::string parallel = "and separately";
  std::string final = "and finally";

  bool operator==(const Connectives&) const = default;
};

/// Sentence frames for rule-based description fusion. Each frame holds its
/// slot exactly once: "{phrase}" in the trigger/action frames, "{trigger}"
/// and "{actions}" in the sentence frame.
struct TemplateSet {
  std::string trigger_frame = "{phrase}";
  std::string action_frame = "{phrase}";
  Connectives connectives;
  std::string sentence_frame = "If {trigger}, {actions}.";

  void validate() const;  // throws kTemplate
  bool operator==(const TemplateSet&) const = default;
};

inline constexpr std::string_view kTemplateVersion = "wpg-template-v1";

TemplateSet parse_templates(std::string_view json_text);
TemplateSet load_templates(const std::filesystem::path& path);

// Connective synonym swaps, so a parser cannot key on one surface style.
struct ParaphraseOptions {
  bool enabled = false;
  std::uint64_t seed = 0;
};

// Catalog phrase placed in the role's frame. Throws kMissingPhrase.
std::string tap_phrase(const MacroFunction& fn, Role role, const TemplateSet& templates = {});
std::string tap_phrase(const Catalog& catalog, const FunctionRef& fn, Role role, const TemplateSet& templates = {});

/// Draft instruction for a workflow: the trigger phrase, then every action
/// phrase in depth-first order, each introduced by a connective:
///   - the action of a Sequence, and the first action of a root
///     Parallel_Split, take `first` ("then");
///   - every other Parallel_Split action takes `parallel`;
///   - with three or more actions the last one takes `final` instead.
std::string fuse_descriptions(const Wast& w, const Catalog& catalog, const TemplateSet& templates = {},
                              const ParaphraseOptions& paraphrase = {});

}  // namespace wpg
