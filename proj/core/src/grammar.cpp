#include "wpg/grammar.hpp"

#include <set>

#include "wpg/catalog.hpp"
#include "wpg/error.hpp"

namespace wpg {

std::string_view cardinality_suffix(Cardinality c) {
  switch (c) {
    case Cardinality::kSingle: return "";
    case Cardinality::kOptional: return "?";
    case Cardinality::kSequential: return "*";
  }
  return "";
}

std::string FieldDef::label() const {
  std::string out = type_name;
  out += cardinality_suffix(cardinality);
  out += ' ';
  out += name;
  return out;
}

std::string ConstructorDef::signature() const {
  std::string out = name + "(";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ", ";
    out += fields[i].label();
  }
  out += ")";
  return out;
}

GrammarSpec::GrammarSpec(std::vector<TypeDef> types, std::string root_type)
    : types_(std::move(types)), root_type_(std::move(root_type)) {
  validate();
}

void GrammarSpec::validate() const {
  std::set<std::string> type_names;
  for (const auto& t : types_) {
    if (!type_names.insert(t.name).second) {
      throw Error(ErrorCode::kInvalidGrammar, "duplicate type '" + t.name + "'");
    }
  }
  if (!type_names.contains(root_type_)) {
    throw Error(ErrorCode::kInvalidGrammar, "root type '" + root_type_ + "' is not defined");
  }
  std::set<std::string> ctor_names;
  for (const auto& t : types_) {
    if (!t.terminal && t.constructors.empty()) {
      throw Error(ErrorCode::kInvalidGrammar, "type '" + t.name + "' has no constructors");
    }
    for (const auto& c : t.constructors) {
      if (!ctor_names.insert(c.name).second) {
        throw Error(ErrorCode::kInvalidGrammar, "duplicate constructor '" + c.name + "'");
      }
      std::set<std::string> field_names;
      for (const auto& f : c.fields) {
        if (!field_names.insert(f.name).second) {
          throw Error(ErrorCode::kInvalidGrammar,
                      "duplicate field '" + f.name + "' in " + c.name);
        }
        if (!type_names.contains(f.type_name)) {
          throw Error(ErrorCode::kInvalidGrammar,
                      "field '" + f.name + "' of " + c.name + " names unknown type '" +
                          f.type_name + "'");
        }
      }
    }
  }
}

const TypeDef* GrammarSpec::find_type(std::string_view name) const {
  for (const auto& t : types_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const ConstructorDef* GrammarSpec::find_constructor(std::string_view name) const {
  for (const auto& t : types_) {
    for (const auto& c : t.constructors) {
      if (c.name == name) return &c;
    }
  }
  return nullptr;
}

std::string GrammarSpec::type_of_constructor(std::string_view name) const {
  for (const auto& t : types_) {
    for (const auto& c : t.constructors) {
      if (c.name == name) return t.name;
    }
  }
  return {};
}

std::vector<std::string> GrammarSpec::constructors_of(std::string_view type_name) const {
  std::vector<std::string> out;
  if (const TypeDef* t = find_type(type_name)) {
    for (const auto& c : t->constructors) out.push_back(c.name);
  }
  return out;
}

GrammarSpec GrammarSpec::with_catalog(const Catalog& catalog) const {
  std::vector<TypeDef> types = types_;
  for (auto& t : types) {
    if (!t.terminal) continue;
    t.terminals.clear();
    for (const auto& ch : catalog.channels()) t.terminals.push_back(ch.name);
  }
  return GrammarSpec(std::move(types), root_type_);
}

const GrammarSpec& builtin_wpg() {
  static const GrammarSpec spec = [] {
    using C = Cardinality;
    std::vector<TypeDef> types;
    types.push_back({"stmt", {{"Workflow", {{"pattern", "wpg", C::kSingle}}}}, false, {}});
    types.push_back({"wpg",
                     {{"Sequence", {{"trigger", "func", C::kOptional}, {"action", "func", C::kSingle}}},
                      {"Parallel_Split",
                       {{"trigger", "func", C::kOptional}, {"action", "func", C::kSequential}}}},
                     false,
                     {}});
    types.push_back(
        {"func", {{"Call", {{"channel", "type", C::kSingle}, {"next", "wpg", C::kOptional}}}}, false, {}});
    types.push_back({std::string(kTerminalType), {}, true, {}});
    return GrammarSpec(std::move(types), "stmt");
  }();
  return spec;
}

bool is_builtin_wpg(const GrammarSpec& grammar) {
  const GrammarSpec& ref = builtin_wpg();
  if (grammar.root_type() != ref.root_type() || grammar.types().size() != ref.types().size()) {
    return false;
  }
  for (std::size_t i = 0; i < ref.types().size(); ++i) {
    const auto& a = grammar.types()[i];
    const auto& b = ref.types()[i];
    if (a.name != b.name || a.terminal != b.terminal || !(a.constructors == b.constructors)) {
      return false;
    }
  }
  return true;
}

}  // namespace wpg
