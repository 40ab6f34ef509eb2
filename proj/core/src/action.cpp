#include "wpg/action.hpp"

#include <cctype>

#include "wpg/error.hpp"

namespace wpg {

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  for (char ch : s) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') return false;
  }
  return true;
}

}  // namespace

std::string Action::text() const {
  switch (kind) {
    case Kind::kApplyConstr: return "ApplyConstr[" + token + "]";
    case Kind::kSelectMacr: return "SelectMacr[" + token + "]";
    case Kind::kStopExpnsn: return "StopExpnsn";
  }
  return {};
}

Action Action::parse(std::string_view text) {
  if (text == "StopExpnsn") return stop();
  auto bracketed = [&](std::string_view prefix) -> std::string_view {
    if (text.size() > prefix.size() + 1 && text.substr(0, prefix.size()) == prefix &&
        text[prefix.size()] == '[' && text.back() == ']') {
      return text.substr(prefix.size() + 1, text.size() - prefix.size() - 2);
    }
    return {};
  };
  if (auto inner = bracketed("ApplyConstr"); !inner.empty()) {
    if (auto c = constructor_from_name(inner)) return apply(*c);
    throw Error(ErrorCode::kMalformedAction, "unknown constructor in action '" + std::string(text) + "'");
  }
  if (auto inner = bracketed("SelectMacr"); is_identifier(inner)) {
    return select(std::string(inner));
  }
  throw Error(ErrorCode::kMalformedAction, "malformed action '" + std::string(text) + "'");
}

std::vector<std::string> to_text(const std::vector<Action>& actions) {
  std::vector<std::string> out;
  out.reserve(actions.size());
  for (const auto& a : actions) out.push_back(a.text());
  return out;
}

}  // namespace wpg
