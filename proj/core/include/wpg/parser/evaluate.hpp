#pragma once

#include <map>
#include <string>
#include <vector>

#include "wpg/dataset.hpp"
#include "wpg/parser/beam_search.hpp"
#include "wpg/parser/scorer.hpp"

namespace wpg {

/// What a decoder needs: the catalog, a scorer (or the per-example oracle),
/// decoding bounds and beam options.
struct ParserBundle {
  const Catalog& catalog;
  const Scorer* scorer = nullptr;
  bool oracle = false;
  Limits limits{3, 3};
  BeamOptions beam;
};

struct DepthMetrics {
  std::size_t n = 0;
  std::size_t exact = 0;
};

struct Metrics {
  double exact_match = 0;
  double action_accuracy = 0;
  std::map<std::size_t, DepthMetrics> per_depth;
  std::size_t n = 0;
};

struct EvalOptions {
  // Accept records whose NL has not been reviewed by a person.
  bool allow_synthetic = false;
};

/// Top-1 exact match (structural) and teacher-forced action accuracy.
/// Throws kEmptyDataset for no examples and kUnreviewed when a record is
/// not reviewed and synthetic NL is not allowed.
Metrics evaluate(const std::vector<Example>& examples, const ParserBundle& bundle, const EvalOptions& options = {});

std::string metrics_to_json(const Metrics& m);

// Top-1 parse of free text.
Parse parse_text(std::string_view text, const ParserBundle& bundle, const std::vector<Action>* gold = nullptr);

}  // namespace wpg
