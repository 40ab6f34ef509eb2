#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "wpg/tree.hpp"

namespace wpg {

/// One transition of the AST builder.
struct Action {
  enum class Kind : std::uint8_t { kApplyConstr, kSelectMacr, kStopExpnsn };

  Kind kind = Kind::kStopExpnsn;
  // Constructor name for ApplyConstr; channel or function name for SelectMacr.
  std::string token;

  static Action apply(Constructor c) { return {Kind::kApplyConstr, std::string(constructor_name(c))}; }
  static Action select(std::string token) { return {Kind::kSelectMacr, std::move(token)}; }
  static Action stop() { return {Kind::kStopExpnsn, {}}; }

  // Canonical text: "ApplyConstr[Sequence]", "SelectMacr[Android]", "StopExpnsn".
  std::string text() const;
  // Inverse of text(); throws Error(kMalformedAction).
  static Action parse(std::string_view text);

  auto operator<=>(const Action&) const = default;
};

std::vector<std::string> to_text(const std::vector<Action>& actions);

}  // namespace wpg
