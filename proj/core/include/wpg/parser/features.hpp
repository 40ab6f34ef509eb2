#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wpg/catalog.hpp"
#include "wpg/parser/scorer.hpp"

namespace wpg {

using SparseFeatures = std::vector<std::pair<std::string, double>>;

/// Feature templates of the baseline scorer. Each legal action gets
///   - structural indicators: action bias, frontier field, previous action,
///     pattern depth, and connective/attachment context of the upcoming
///     clause (conjoined with the action);
///   - lexical overlap between the clause aligned with the current Call and
///     the candidate's catalog phrase and name fragments.
/// Clause j of the utterance is aligned with the j-th selected function.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(const Catalog& catalog);

  const Catalog& catalog() const { return catalog_; }

  // One feature list per entry of ctx.legal.
  std::vector<SparseFeatures> extract(const ScoringContext& ctx) const;

  // Catalog function whose phrase overlaps clause `j` best (trigger-capable
  // for j == 0, action-capable otherwise); nullopt without any overlap.
  std::optional<FunctionId> best_function(const Utterance& x, std::size_t j) const;

 private:
  struct Entry {
    std::vector<std::string> phrase;  // sorted, unique
    std::vector<std::string> name;    // lowercased name fragments
    std::vector<std::string> channel;
  };

  double phrase_overlap(FunctionId f, const std::vector<std::string>& clause) const;

  const Catalog& catalog_;
  std::vector<Entry> entries_;
};

// |a ∩ b| / |a ∪ b| over sorted unique token lists.
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);
// Fraction of `fragments` present in `tokens` (sorted unique).
double coverage(const std::vector<std::string>& fragments, const std::vector<std::string>& tokens);
std::vector<std::string> sorted_unique(std::vector<std::string> tokens);

}  // namespace wpg
