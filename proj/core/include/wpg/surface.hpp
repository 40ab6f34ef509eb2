#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "wpg/action.hpp"
#include "wpg/catalog.hpp"
#include "wpg/tree.hpp"

namespace wpg {

/// Canonical formal expression, e.g.
///   Sequence(Android.Any_Missed_Phone, Parallel_Split(Watson_API.Voice_to_Text,
///            SMS.Send_Text_to_Me, Google_Drive.Archive_Text_in_Spread_Sheet))
/// (on one line). A Call that chains into a pattern is written as that
/// pattern with the Call's function inlined as its first argument.
/// Throws kInvalidWast for malformed trees.
std::string to_formal_expression(const Wast& w);

/// Inverse of to_formal_expression(). Whitespace between tokens is ignored.
/// Errors: kLexical, kUnknownChannel, kUnknownFunction, kArity, kDataFlow.
Wast parse_formal_expression(std::string_view text, const Catalog& catalog);

std::vector<std::string> actions_to_text(const std::vector<Action>& actions);
// Blank lines are ignored; throws kMalformedAction on an unknown token.
std::vector<Action> text_to_actions(const std::vector<std::string>& lines);

// Action-sequence files: one action per line, workflows separated by a
// blank line.
std::string format_action_blocks(const std::vector<std::vector<Action>>& blocks);
std::vector<std::vector<Action>> parse_action_blocks(std::string_view text);

}  // namespace wpg
