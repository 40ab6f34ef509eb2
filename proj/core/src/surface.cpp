#include "wpg/surface.hpp"

#include <cctype>
#include <sstream>

#include "wpg/error.hpp"
#include "wpg/transition.hpp"

namespace wpg {

namespace {

void render_call(const Tree& tree, NodeId call, std::string& out);

// `inlined` is the function of the Call that chains into this pattern, if any.
void render_pattern(const Tree& tree, NodeId pattern, const FunctionRef* inlined, std::string& out) {
  const Node& n = tree.node(pattern);
  if (!is_pattern(n.ctor)) throw Error(ErrorCode::kInvalidWast, "expected a pattern node");
  out += constructor_name(n.ctor);
  out += '(';
  bool first = true;
  auto sep = [&] {
    if (!first) out += ", ";
    first = false;
  };
  if (inlined != nullptr) {
    if (!n.children[field::kTrigger].empty()) {
      throw Error(ErrorCode::kInvalidWast, "a chained pattern must have a null trigger");
    }
    sep();
    out += inlined->str();
  } else {
    if (n.children[field::kTrigger].size() != 1) {
      throw Error(ErrorCode::kInvalidWast, "the root pattern needs exactly one trigger");
    }
    sep();
    render_call(tree, n.children[field::kTrigger].front(), out);
  }
  for (NodeId a : n.children[field::kAction]) {
    sep();
    render_call(tree, a, out);
  }
  out += ')';
}

void render_call(const Tree& tree, NodeId call, std::string& out) {
  const Node& n = tree.node(call);
  if (n.ctor != Constructor::kCall || n.channel.empty() || n.function.empty()) {
    throw Error(ErrorCode::kInvalidWast, "Call without a selected channel and function");
  }
  const FunctionRef fn = tree.function_of(call);
  const NodeId next = tree.next(call);
  if (next == kNoNode) out += fn.str();
  else render_pattern(tree, next, &fn, out);
}

// --- Lexer -----------------------------------------------------------------

enum class Tok { kIdent, kLParen, kRParen, kComma, kDot, kEnd };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto ch = static_cast<unsigned char>(s[i]);
    if (std::isspace(ch)) {
      ++i;
    } else if (std::isalpha(ch)) {
      const std::size_t start = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::kIdent, std::string(s.substr(start, i - start)), start});
    } else if (ch == '(' || ch == ')' || ch == ',' || ch == '.') {
      const Tok k = ch == '(' ? Tok::kLParen : ch == ')' ? Tok::kRParen : ch == ',' ? Tok::kComma : Tok::kDot;
      out.push_back({k, std::string(1, static_cast<char>(ch)), i});
      ++i;
    } else {
      throw Error(ErrorCode::kLexical,
                  "unexpected character '" + std::string(1, static_cast<char>(ch)) + "' at offset " + std::to_string(i));
    }
  }
  out.push_back({Tok::kEnd, "", s.size()});
  return out;
}

// --- Parser ----------------------------------------------------------------
//   Pattern := ("Sequence" | "Parallel_Split") "(" Arg { "," Arg } ")"
//   Arg     := FuncRef | Pattern
//   FuncRef := Ident "." Ident
// The first token of an Arg decides: a constructor keyword starts a Pattern.

class SurfaceParser {
 public:
  SurfaceParser(std::string_view text, const Catalog& catalog) : toks_(lex(text)), catalog_(catalog) {}

  expr::Pattern parse_top() {
    auto args = pattern_args();
    expr::Pattern p = build(std::move(args), /*chained=*/false);
    expect(Tok::kEnd, "end of input");
    return p;
  }

 private:
  struct PendingPattern;
  struct Arg {
    FunctionRef fn;
    std::vector<PendingPattern> nested;  // zero or one
  };
  struct PendingPattern {
    Constructor kind;
    std::vector<Arg> args;
  };

  const Token& peek() const { return toks_[pos_]; }

  const Token& expect(Tok kind, const char* what) {
    const Token& t = toks_[pos_];
    if (t.kind != kind) {
      throw Error(ErrorCode::kLexical, std::string("expected ") + what + " at offset " + std::to_string(t.pos) +
                                           (t.text.empty() ? std::string() : ", found '" + t.text + "'"));
    }
    ++pos_;
    return t;
  }

  // Parses "Kind ( Arg, ... )" and returns the pattern in surface form.
  PendingPattern pattern_args() {
    const Token& kw = expect(Tok::kIdent, "Sequence or Parallel_Split");
    const auto ctor = constructor_from_name(kw.text);
    if (!ctor || !is_pattern(*ctor)) {
      throw Error(ErrorCode::kLexical, "expected Sequence or Parallel_Split at offset " + std::to_string(kw.pos) +
                                           ", found '" + kw.text + "'");
    }
    expect(Tok::kLParen, "'('");
    PendingPattern p{*ctor, {}};
    p.args.push_back(arg());
    while (peek().kind == Tok::kComma) {
      ++pos_;
      p.args.push_back(arg());
    }
    expect(Tok::kRParen, "')' or ','");
    return p;
  }

  Arg arg() {
    const Token& t = peek();
    if (t.kind == Tok::kIdent && constructor_from_name(t.text) && is_pattern(*constructor_from_name(t.text)) &&
        toks_[pos_ + 1].kind == Tok::kLParen) {
      PendingPattern nested = pattern_args();
      // The inlined first argument of a nested pattern is the chaining function.
      if (!nested.args.front().nested.empty()) {
        throw Error(ErrorCode::kArity, "the first argument of a nested " +
                                           std::string(constructor_name(nested.kind)) + " must be a function");
      }
      Arg out{nested.args.front().fn, {}};
      out.nested.push_back(std::move(nested));
      return out;
    }
    const Token& channel = expect(Tok::kIdent, "a channel name");
    expect(Tok::kDot, "'.'");
    const Token& function = expect(Tok::kIdent, "a function name");
    if (catalog_.find_channel(channel.text) == nullptr) {
      throw Error(ErrorCode::kUnknownChannel, "unknown channel '" + channel.text + "'");
    }
    if (catalog_.find(channel.text, function.text) == nullptr) {
      throw Error(ErrorCode::kUnknownFunction, "unknown function '" + channel.text + "." + function.text + "'");
    }
    return Arg{FunctionRef{channel.text, function.text}, {}};
  }

  expr::Call to_call(Arg a) {
    expr::Call c{std::move(a.fn), {}};
    if (!a.nested.empty()) c.next.push_back(build(std::move(a.nested.front()), /*chained=*/true));
    return c;
  }

  // Surface arguments -> structural pattern. At the top level the first
  // argument is the trigger; in a nested pattern it is the inlined chain
  // function, already moved onto the enclosing Call.
  expr::Pattern build(PendingPattern p, bool chained) {
    const std::size_t actions = p.args.size() - 1;
    const std::string name(constructor_name(p.kind));
    if (p.kind == Constructor::kSequence && p.args.size() != 2) {
      throw Error(ErrorCode::kArity, "Sequence takes exactly 2 arguments, found " + std::to_string(p.args.size()));
    }
    if (p.kind == Constructor::kParallelSplit && actions < 2) {
      throw Error(ErrorCode::kArity, "Parallel_Split needs a trigger and at least 2 actions, found " +
                                         std::to_string(p.args.size()) + " arguments");
    }
    expr::Pattern out;
    out.kind = p.kind;
    if (!chained) {
      if (!p.args.front().nested.empty()) {
        throw Error(ErrorCode::kArity, "the trigger of " + name + " must be a function");
      }
      out.trigger.push_back(to_call(std::move(p.args.front())));
    }
    for (std::size_t i = 1; i < p.args.size(); ++i) out.actions.push_back(to_call(std::move(p.args[i])));
    return out;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Catalog& catalog_;
};

}  // namespace

std::string to_formal_expression(const Wast& w) {
  const Tree& tree = w.tree();
  if (tree.empty() || tree.node(tree.root()).ctor != Constructor::kWorkflow || tree.root_pattern() == kNoNode) {
    throw Error(ErrorCode::kInvalidWast, "formal expressions need a Workflow with a pattern");
  }
  std::string out;
  render_pattern(tree, tree.root_pattern(), nullptr, out);
  return out;
}

Wast parse_formal_expression(std::string_view text, const Catalog& catalog) {
  SurfaceParser parser(text, catalog);
  Wast w = expr::workflow(parser.parse_top());
  const auto violations = validate_wast(w, catalog);
  if (!violations.empty()) {
    std::string msg = "data-flow violation: " + violations.front().message;
    if (violations.size() > 1) msg += " (+" + std::to_string(violations.size() - 1) + " more)";
    throw Error(ErrorCode::kDataFlow, msg);
  }
  return w;
}

std::vector<std::string> actions_to_text(const std::vector<Action>& actions) { return to_text(actions); }

std::vector<Action> text_to_actions(const std::vector<std::string>& lines) {
  std::vector<Action> out;
  for (const auto& raw : lines) {
    std::string_view line = raw;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    if (line.empty()) continue;
    out.push_back(Action::parse(line));
  }
  return out;
}

std::string format_action_blocks(const std::vector<std::vector<Action>>& blocks) {
  std::string out;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (b > 0) out += '\n';
    for (const auto& a : blocks[b]) {
      out += a.text();
      out += '\n';
    }
  }
  return out;
}

std::vector<std::vector<Action>> parse_action_blocks(std::string_view text) {
  std::vector<std::vector<Action>> blocks;
  std::vector<std::string> current;
  std::istringstream in{std::string(text)};
  std::string line;
  auto flush = [&] {
    if (!current.empty()) blocks.push_back(text_to_actions(current));
    current.clear();
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) flush();
    else current.push_back(line);
  }
  flush();
  return blocks;
}

}  // namespace wpg
