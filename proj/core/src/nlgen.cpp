#include "wpg/nlgen.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "wpg/error.hpp"
#include "wpg/random.hpp"

namespace wpg {

namespace {

std::size_t count_of(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

std::string fill(std::string_view frame, std::string_view slot, std::string_view value) {
  std::string out(frame);
  const auto pos = out.find(slot);
  out.replace(pos, slot.size(), value);
  return out;
}

enum class Link { kFirst, kParallel, kFinal };

const std::vector<std::string>& synonyms(Link link) {
  static const std::vector<std::string> first = {"then", "after that", "and then"};
  static const std::vector<std::string> parallel = {"and separately", "and also", "and in parallel"};
  static const std::vector<std::string> final = {"and finally", "and lastly"};
  switch (link) {
    case Link::kFirst: return first;
    case Link::kParallel: return parallel;
    case Link::kFinal: return final;
  }
  return first;
}

}  // namespace

void TemplateSet::validate() const {
  auto check = [](std::string_view name, std::string_view frame, std::string_view slot) {
    if (count_of(frame, slot) != 1) {
      throw Error(ErrorCode::kTemplate,
                  std::string(name) + " must contain " + std::string(slot) + " exactly once: '" + std::string(frame) + "'");
    }
  };
  check("trigger_frame", trigger_frame, "{phrase}");
  check("action_frame", action_frame, "{phrase}");
  check("sentence_frame", sentence_frame, "{trigger}");
  check("sentence_frame", sentence_frame, "{actions}");
  if (connectives.first.empty() || connectives.parallel.empty() || connectives.final.empty()) {
    throw Error(ErrorCode::kTemplate, "connectives must be non-empty");
  }
}

TemplateSet parse_templates(std::string_view json_text) {
  using nlohmann::json;
  TemplateSet t;
  try {
    const json doc = json::parse(json_text);
    t.trigger_frame = doc.at("trigger_frame").get<std::string>();
    t.action_frame = doc.at("action_frame").get<std::string>();
    t.sentence_frame = doc.at("sentence_frame").get<std::string>();
    const json& c = doc.at("connectives");
    t.connectives.first = c.at("first").get<std::string>();
    t.connectives.parallel = c.at("parallel").get<std::string>();
    t.connectives.final = c.at("final").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kTemplate, std::string("bad template file: ") + e.what());
  }
  t.validate();
  return t;
}

TemplateSet load_templates(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open template file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_templates(buf.str());
}

std::string tap_phrase(const MacroFunction& fn, Role role, const TemplateSet& templates) {
  if (fn.phrase.empty()) throw Error(ErrorCode::kMissingPhrase, "no phrase for " + fn.ref().str());
  return fill(role == Role::kTrigger ? templates.trigger_frame : templates.action_frame, "{phrase}", fn.phrase);
}

std::string tap_phrase(const Catalog& catalog, const FunctionRef& fn, Role role, const TemplateSet& templates) {
  const MacroFunction* f = catalog.find(fn);
  if (f == nullptr) throw Error(ErrorCode::kMissingPhrase, "no phrase for unknown function " + fn.str());
  return tap_phrase(*f, role, templates);
}

std::string fuse_descriptions(const Wast& w, const Catalog& catalog, const TemplateSet& templates,
                              const ParaphraseOptions& paraphrase) {
  templates.validate();
  const Tree& tree = w.tree();
  const NodeId root = tree.root_pattern();
  if (root == kNoNode || tree.trigger(root) == kNoNode) {
    throw Error(ErrorCode::kInvalidWast, "a description needs a root pattern with a trigger");
  }

  struct Clause {
    Link link;
    std::string phrase;
  };
  std::vector<Clause> clauses;
  std::function<void(NodeId, bool)> visit = [&](NodeId pattern, bool is_root) {
    const bool split = tree.node(pattern).ctor == Constructor::kParallelSplit;
    const auto actions = tree.actions(pattern);
    for (std::size_t i = 0; i < actions.size(); ++i) {
      const bool first = !split || (is_root && i == 0);
      clauses.push_back({first ? Link::kFirst : Link::kParallel,
                         tap_phrase(catalog, tree.function_of(actions[i]), Role::kAction, templates)});
      if (NodeId nx = tree.next(actions[i]); nx != kNoNode) visit(nx, false);
    }
  };
  visit(root, true);
  if (clauses.size() >= 3) clauses.back().link = Link::kFinal;

  Rng rng(paraphrase.seed);
  std::string actions_text;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    std::string connective;
    if (paraphrase.enabled) {
      const auto& options = synonyms(clauses[i].link);
      connective = options[rng.below(options.size())];
    } else {
      connective = clauses[i].link == Link::kFirst      ? templates.connectives.first
                   : clauses[i].link == Link::kParallel ? templates.connectives.parallel
                                                        : templates.connectives.final;
    }
    if (i > 0) actions_text += ", ";
    actions_text += connective + " " + clauses[i].phrase;
  }
  const std::string trigger = tap_phrase(catalog, tree.function_of(tree.trigger(root)), Role::kTrigger, templates);
  return fill(fill(templates.sentence_frame, "{trigger}", trigger), "{actions}", actions_text);
}

}  // namespace wpg
