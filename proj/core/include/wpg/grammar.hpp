#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wpg {

class Catalog;

enum class Cardinality { kSingle, kOptional, kSequential };

struct FieldDef {
  std::string name;
  std::string type_name;
  Cardinality cardinality = Cardinality::kSingle;

  // ASDL-style rendering, e.g. "func? trigger".
  std::string label() const;

  bool operator==(const FieldDef&) const = default;
};

struct ConstructorDef {
  std::string name;
  std::vector<FieldDef> fields;

  // e.g. "Parallel_Split(func? trigger, func* action)".
  std::string signature() const;

  bool operator==(const ConstructorDef&) const = default;
};

// A type is either a sum of constructors or the terminal pseudo-type whose
// values come from the attached catalog (channel names).
struct TypeDef {
  std::string name;
  std::vector<ConstructorDef> constructors;
  bool terminal = false;
  std::vector<std::string> terminals;

  bool operator==(const TypeDef&) const = default;
};

/// The workflow patterns grammar as data: types, constructors, and fields
/// with their cardinalities. Immutable once built.
class GrammarSpec {
 public:
  GrammarSpec(std::vector<TypeDef> types, std::string root_type);

  const std::vector<TypeDef>& types() const { return types_; }
  const std::string& root_type() const { return root_type_; }

  const TypeDef* find_type(std::string_view name) const;
  const ConstructorDef* find_constructor(std::string_view name) const;
  // Name of the type a constructor belongs to, or empty when unknown.
  std::string type_of_constructor(std::string_view name) const;
  std::vector<std::string> constructors_of(std::string_view type_name) const;

  // Copy with the terminal pseudo-type expanded to the catalog's channels.
  GrammarSpec with_catalog(const Catalog& catalog) const;

  bool operator==(const GrammarSpec&) const = default;

 private:
  void validate() const;

  std::vector<TypeDef> types_;
  std::string root_type_;
};

inline constexpr std::string_view kTerminalType = "type";

/// stmt = Workflow(wpg pattern)
/// wpg  = Sequence(func? trigger, func action)
///      | Parallel_Split(func? trigger, func* action)
/// func = Call(type channel, wpg? next)
/// type = <channels from the catalog>
const GrammarSpec& builtin_wpg();

// Equality with the builtin grammar, ignoring attached terminals.
bool is_builtin_wpg(const GrammarSpec& grammar);

std::string_view cardinality_suffix(Cardinality c);

}  // namespace wpg
