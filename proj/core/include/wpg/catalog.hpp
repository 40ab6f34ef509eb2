#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wpg/tree.hpp"

namespace wpg {

// Category of data a function consumes or produces. None on the output side
// means the function cannot chain onward.
enum class DataKind { kNone, kEvent, kAudio, kText, kFile, kImage, kUrl };
enum class Capability { kTrigger, kAction, kBoth };

std::string_view to_string(DataKind kind);
std::optional<DataKind> data_kind_from_string(std::string_view name);
std::string_view to_string(Capability cap);
std::optional<Capability> capability_from_string(std::string_view name);

// Output of `from` can feed the input of `to`.
inline bool kinds_compatible(DataKind from_output, DataKind to_input) {
  return from_output != DataKind::kNone && from_output == to_input;
}

struct MacroFunction {
  std::string channel;
  std::string name;
  Capability capability = Capability::kAction;
  DataKind input_kind = DataKind::kNone;
  DataKind output_kind = DataKind::kNone;
  std::string phrase;

  bool can_trigger() const { return capability != Capability::kAction; }
  bool can_act() const { return capability != Capability::kTrigger; }
  FunctionRef ref() const { return {channel, name}; }

  bool operator==(const MacroFunction&) const = default;
};

struct Channel {
  std::string name;
  std::string description;
  std::vector<MacroFunction> functions;

  bool operator==(const Channel&) const = default;
};

// An action function whose completion evokes the next workflow, feeding the
// `to` function.
struct ChainRule {
  FunctionRef from;
  FunctionRef to;

  auto operator<=>(const ChainRule&) const = default;
};

enum class ChainMode { kStrict, kKindFallback };

std::string_view to_string(ChainMode mode);
std::optional<ChainMode> chain_mode_from_string(std::string_view name);

/// `g` may follow `f` on a chain edge. Strict mode consults only the explicit
/// rules; fallback mode also accepts any data-kind match.
bool chainable(const MacroFunction& f, const MacroFunction& g, std::span<const ChainRule> rules,
               ChainMode mode);

using FunctionId = std::size_t;

/// The TAP vocabulary. Validated on construction and immutable afterwards.
class Catalog {
 public:
  static constexpr int kFormatVersion = 1;

  Catalog(std::vector<Channel> channels, std::vector<ChainRule> rules,
          ChainMode mode = ChainMode::kStrict, int version = kFormatVersion);

  int version() const { return version_; }
  ChainMode mode() const { return mode_; }
  const std::vector<Channel>& channels() const { return channels_; }
  const std::vector<ChainRule>& rules() const { return rules_; }

  Catalog with_mode(ChainMode mode) const;
  // Keeps only the listed functions, the channels holding them, and the rules
  // among them.
  Catalog restricted_to(std::span<const FunctionRef> keep) const;

  std::size_t function_count() const { return index_.size(); }
  const MacroFunction& function(FunctionId id) const;
  std::optional<FunctionId> find_id(const FunctionRef& ref) const;
  const MacroFunction* find(const FunctionRef& ref) const;
  const MacroFunction* find(std::string_view channel, std::string_view function) const;
  const Channel* find_channel(std::string_view name) const;

  bool chainable(const MacroFunction& f, const MacroFunction& g) const;
  bool has_rule(const FunctionRef& from, const FunctionRef& to) const;

  // Action-capable functions that can directly follow trigger `f` in one TAP
  // (always by data kind).
  const std::vector<FunctionId>& tap_successors(FunctionId f) const { return tap_succ_.at(f); }
  // Action-capable functions that can follow action `g` through a chain edge
  // in the active mode.
  const std::vector<FunctionId>& chain_successors(FunctionId g) const {
    return mode_ == ChainMode::kStrict ? strict_succ_.at(g) : fallback_succ_.at(g);
  }

  bool operator==(const Catalog& o) const {
    return version_ == o.version_ && channels_ == o.channels_ && rules_ == o.rules_;
  }

 private:
  void build_index();
  void validate() const;

  int version_;
  ChainMode mode_;
  std::vector<Channel> channels_;
  std::vector<ChainRule> rules_;
  std::vector<std::pair<std::size_t, std::size_t>> index_;  // id -> (channel, function)
  std::map<FunctionRef, FunctionId> by_ref_;
  std::vector<std::vector<FunctionId>> tap_succ_;
  std::vector<std::vector<FunctionId>> strict_succ_;
  std::vector<std::vector<FunctionId>> fallback_succ_;
};

Catalog parse_catalog(std::string_view json_text, ChainMode mode = ChainMode::kStrict);
Catalog load_catalog(const std::filesystem::path& path, ChainMode mode = ChainMode::kStrict);
// Canonical JSON text (two-space indent, declared key order, trailing newline).
std::string save_catalog(const Catalog& catalog);
void save_catalog(const Catalog& catalog, const std::filesystem::path& path);

/// Hand-authored vocabulary: the four functions of the running example plus
/// enough channels to make generated corpora varied.
const Catalog& builtin_demo_catalog();

// The four functions of the running missed-call example.
std::vector<FunctionRef> example_workflow_functions();

}  // namespace wpg
