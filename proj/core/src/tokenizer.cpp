#include "wpg/parser/tokenizer.hpp"

#include <array>
#include <utility>

#include "wpg/error.hpp"

namespace wpg {

std::string_view to_string(Lead lead) {
  switch (lead) {
    case Lead::kIf: return "IF";
    case Lead::kThen: return "THEN";
    case Lead::kSeparately: return "SEP";
    case Lead::kFinally: return "FIN";
    case Lead::kNone: return "NONE";
  }
  return "";
}

namespace {

bool word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c >= 0x80;
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

struct Connective {
  std::array<std::string_view, 3> words;
  std::size_t length;
  Lead lead;
};

// Longest first, so "and then" wins over a bare "then".
const std::array<Connective, 11> kConnectives = {{
    {{"and", "in", "parallel"}, 3, Lead::kSeparately},
    {{"and", "separately", ""}, 2, Lead::kSeparately},
    {{"and", "also", ""}, 2, Lead::kSeparately},
    {{"and", "finally", ""}, 2, Lead::kFinally},
    {{"and", "lastly", ""}, 2, Lead::kFinally},
    {{"and", "then", ""}, 2, Lead::kThen},
    {{"after", "that", ""}, 2, Lead::kThen},
    {{"then", "", ""}, 1, Lead::kThen},
    {{"finally", "", ""}, 1, Lead::kFinally},
    {{"separately", "", ""}, 1, Lead::kSeparately},
    {{"if", "", ""}, 1, Lead::kIf},
}};

}  // namespace

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (word_byte(static_cast<unsigned char>(ch))) {
      cur += lower(ch);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<Clause> segment_clauses(std::string_view text) {
  // Tokens with hard boundaries from punctuation marked by empty strings.
  std::vector<std::string> stream;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) stream.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : text) {
    if (word_byte(static_cast<unsigned char>(ch))) {
      cur += lower(ch);
      continue;
    }
    flush();
    if (ch == ',' || ch == ';' || ch == '.' || ch == '!' || ch == '?' || ch == ':') stream.emplace_back();
  }
  flush();

  std::vector<Clause> clauses;
  Clause open;
  bool open_used = false;
  auto close = [&] {
    if (open_used && (!open.tokens.empty() || open.lead != Lead::kNone)) clauses.push_back(std::move(open));
    open = Clause{};
    open_used = false;
  };
  std::size_t i = 0;
  while (i < stream.size()) {
    if (stream[i].empty()) {
      close();
      ++i;
      continue;
    }
    const Connective* match = nullptr;
    for (const auto& c : kConnectives) {
      if (i + c.length > stream.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < c.length; ++k) ok = ok && stream[i + k] == c.words[k];
      // "if" only opens the utterance.
      if (ok && c.lead == Lead::kIf && !clauses.empty()) ok = false;
      if (ok) {
        match = &c;
        break;
      }
    }
    if (match != nullptr) {
      close();
      open.lead = match->lead;
      open_used = true;
      i += match->length;
      continue;
    }
    open.tokens.push_back(stream[i]);
    open_used = true;
    ++i;
  }
  close();
  return clauses;
}

Utterance tokenize(std::string_view text) {
  Utterance u;
  u.raw = std::string(text);
  u.tokens = word_tokens(text);
  if (u.tokens.empty()) throw Error(ErrorCode::kEmptyUtterance, "utterance has no tokens");
  u.clauses = segment_clauses(text);
  return u;
}

}  // namespace wpg
