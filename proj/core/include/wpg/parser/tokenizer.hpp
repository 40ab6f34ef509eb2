#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wpg {

inline constexpr std::string_view kTokenizerVersion = "v1";

// Connective that introduces a clause of a workflow description.
enum class Lead { kIf, kThen, kSeparately, kFinally, kNone };

std::string_view to_string(Lead lead);

struct Clause {
  Lead lead = Lead::kNone;
  std::vector<std::string> tokens;  // connective words removed
};

/// The utterance x: raw text, its tokens w_1..w_n, and its clause split.
struct Utterance {
  std::string raw;
  std::vector<std::string> tokens;
  std::vector<Clause> clauses;

  std::size_t size() const { return tokens.size(); }
};

/// Lowercases ASCII letters and keeps maximal runs of letters, digits,
/// underscores and non-ASCII bytes; everything else separates tokens.
/// Throws kEmptyUtterance when no token remains.
Utterance tokenize(std::string_view text);

std::vector<std::string> word_tokens(std::string_view text);

/// Splits at commas, semicolons and sentence ends, and at connective
/// phrases ("then", "and separately", "and finally" and their synonyms).
std::vector<Clause> segment_clauses(std::string_view text);

}  // namespace wpg
