#include "wpg/parser/features.hpp"

#include <algorithm>

namespace wpg {

std::vector<std::string> sorted_unique(std::vector<std::string> tokens) {
  std::sort(tokens.begin(), tokens.end());
  tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
  return tokens;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

double coverage(const std::vector<std::string>& fragments, const std::vector<std::string>& tokens) {
  if (fragments.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& f : fragments) hit += std::binary_search(tokens.begin(), tokens.end(), f) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(fragments.size());
}

namespace {

std::vector<std::string> fragments(std::string_view name) {
  std::vector<std::string> out;
  for (auto& t : word_tokens(name)) {
    std::size_t start = 0;
    while (start <= t.size()) {
      const auto us = t.find('_', start);
      const auto end = us == std::string::npos ? t.size() : us;
      if (end > start) out.push_back(t.substr(start, end - start));
      if (us == std::string::npos) break;
      start = us + 1;
    }
  }
  return sorted_unique(std::move(out));
}

const char* slot_name(SlotKind k) {
  switch (k) {
    case SlotKind::kRoot: return "root";
    case SlotKind::kPattern: return "pattern";
    case SlotKind::kTrigger: return "trigger";
    case SlotKind::kAction: return "action";
    case SlotKind::kSplitAction: return "split";
    case SlotKind::kChannel: return "channel";
    case SlotKind::kFunction: return "function";
    case SlotKind::kNext: return "next";
  }
  return "?";
}

std::string action_key(const Action& a, SlotKind k) {
  switch (a.kind) {
    case Action::Kind::kApplyConstr: return "A:" + a.token;
    case Action::Kind::kSelectMacr: return k == SlotKind::kChannel ? "C" : "F";
    case Action::Kind::kStopExpnsn: return "S";
  }
  return "?";
}

std::string history_key(std::span<const Action> history) {
  if (history.empty()) return "^";
  const Action& a = history.back();
  switch (a.kind) {
    case Action::Kind::kApplyConstr: return "A:" + a.token;
    case Action::Kind::kSelectMacr: return "M";
    case Action::Kind::kStopExpnsn: return "S";
  }
  return "?";
}

Lead lead_at(const Utterance& x, std::size_t j) {
  return j < x.clauses.size() ? x.clauses[j].lead : Lead::kNone;
}

std::string lead_name(const Utterance& x, std::size_t j) {
  return j < x.clauses.size() ? std::string(to_string(x.clauses[j].lead)) : std::string("END");
}

std::size_t selected_functions(const Tree& tree) {
  std::size_t n = 0;
  for (NodeId id = 0; id < tree.size(); ++id) {
    const Node& node = tree.node(id);
    n += node.ctor == Constructor::kCall && !node.function.empty() ? 1 : 0;
  }
  return n;
}

bool contains(const std::vector<FunctionId>& ids, std::optional<FunctionId> f) {
  return f && std::find(ids.begin(), ids.end(), *f) != ids.end();
}

const char* yn(bool b) { return b ? "1" : "0"; }

}  // namespace

FeatureExtractor::FeatureExtractor(const Catalog& catalog) : catalog_(catalog) {
  entries_.reserve(catalog.function_count());
  for (FunctionId id = 0; id < catalog.function_count(); ++id) {
    const MacroFunction& fn = catalog.function(id);
    entries_.push_back(Entry{sorted_unique(word_tokens(fn.phrase)), fragments(fn.name), fragments(fn.channel)});
  }
}

double FeatureExtractor::phrase_overlap(FunctionId f, const std::vector<std::string>& clause) const {
  return jaccard(entries_[f].phrase, clause);
}

std::optional<FunctionId> FeatureExtractor::best_function(const Utterance& x, std::size_t j) const {
  if (j >= x.clauses.size()) return std::nullopt;
  const auto clause = sorted_unique(x.clauses[j].tokens);
  std::optional<FunctionId> best;
  double best_score = 0.0;
  for (FunctionId id = 0; id < catalog_.function_count(); ++id) {
    const MacroFunction& fn = catalog_.function(id);
    if (j == 0 ? !fn.can_trigger() : !fn.can_act()) continue;
    const double s = phrase_overlap(id, clause);
    if (s > best_score) {
      best_score = s;
      best = id;
    }
  }
  return best;
}

std::vector<SparseFeatures> FeatureExtractor::extract(const ScoringContext& ctx) const {
  const TransitionState& state = ctx.state;
  const Tree& tree = state.tree();
  const Slot slot = state.front();
  const SlotKind kind = slot_kind(state, slot);
  const Utterance& x = ctx.utterance;
  const std::string sname = slot_name(kind);
  const std::string prev = history_key(ctx.history);
  const std::size_t nsel = selected_functions(tree);
  const Limits& limits = ctx.limits;

  auto fits_split = [&](NodeId pattern, std::optional<FunctionId> g) {
    if (!g) return false;
    if (limits.max_branch != 0 && tree.actions(pattern).size() >= limits.max_branch) return false;
    return contains(admissible_actions(tree, pattern, catalog_), g);
  };
  auto fits_outer = [&](std::optional<FunctionId> g) {
    const auto frontier = state.frontier();
    for (std::size_t i = 1; i < frontier.size(); ++i) {
      if (slot_kind(state, frontier[i]) == SlotKind::kSplitAction && fits_split(frontier[i].node, g)) return true;
    }
    return false;
  };

  // Slot-level context shared by all actions at this slot.
  std::vector<std::string> context;
  std::size_t level = 0;
  switch (kind) {
    case SlotKind::kPattern: {
      const auto b0 = best_function(x, 0);
      const auto b1 = best_function(x, 1);
      const auto b2 = best_function(x, 2);
      const bool tap2 = b0 && contains(catalog_.tap_successors(*b0), b2) && b1 != b2;
      const bool deep_ok = limits.max_depth == 0 || limits.max_depth >= 2;
      const bool chain2 = b1 && deep_ok && contains(catalog_.chain_successors(*b1), b2);
      // Some later sibling-style clause the trigger could feed directly.
      bool split_any = false;
      for (std::size_t j = 2; j < x.clauses.size() && b0; ++j) {
        const Lead l = x.clauses[j].lead;
        const auto bj = best_function(x, j);
        split_any = split_any || ((l == Lead::kSeparately || l == Lead::kFinally) && bj != b1 &&
                                  contains(catalog_.tap_successors(*b0), bj));
      }
      context.push_back("R|a" + std::string(yn(split_any)));
      context.push_back("R|" + lead_name(x, 2) + "|a" + yn(split_any) + "|t" + yn(tap2) + "|c" + yn(chain2));
      context.push_back("R|" + lead_name(x, 2));
      context.push_back("R|" + lead_name(x, 2) + "|t" + yn(tap2) + "|c" + yn(chain2));
      context.push_back("R|" + lead_name(x, 2) + "|" + lead_name(x, 3) + "|t" + yn(tap2) + "|c" + yn(chain2));
      level = 1;
      break;
    }
    case SlotKind::kNext: {
      const NodeId call = slot.node;
      const NodeId owner = tree.owning_pattern(call);
      level = tree.pattern_level(owner);
      const auto f = catalog_.find_id(tree.function_of(call));
      const bool deep_ok = limits.max_depth == 0 || level < limits.max_depth;
      const auto g0 = best_function(x, nsel);
      const auto g1 = best_function(x, nsel + 1);
      const bool chain = f && deep_ok && contains(catalog_.chain_successors(*f), g0);
      const bool split2 = f && deep_ok && g0 != g1 && contains(catalog_.chain_successors(*f), g1) &&
                          (lead_at(x, nsel + 1) == Lead::kSeparately || lead_at(x, nsel + 1) == Lead::kFinally);
      const bool sib = fits_outer(g0);
      bool split_any = false;
      for (std::size_t j = nsel + 1; j < x.clauses.size() && f && deep_ok; ++j) {
        const Lead l = x.clauses[j].lead;
        split_any = split_any || ((l == Lead::kSeparately || l == Lead::kFinally) &&
                                  contains(catalog_.chain_successors(*f), best_function(x, j)));
      }
      const std::string lead = lead_name(x, nsel);
      context.push_back("N|" + lead + "|c" + yn(chain) + "|s" + yn(sib) + "|a" + yn(split_any));
      context.push_back("N|" + lead);
      context.push_back("N|" + lead + "|c" + yn(chain) + "|s" + yn(sib));
      context.push_back("N|" + lead + "|c" + yn(chain) + "|s" + yn(sib) + "|p" + yn(split2));
      context.push_back("N|" + lead + "|" + lead_name(x, nsel + 1) + "|c" + yn(chain) + "|s" + yn(sib) + "|p" +
                        yn(split2));
      break;
    }
    case SlotKind::kSplitAction: {
      const NodeId pattern = slot.node;
      level = tree.pattern_level(pattern);
      const auto g0 = best_function(x, nsel);
      const bool here = fits_split(pattern, g0);
      const bool outer = fits_outer(g0);
      const std::string lead = lead_name(x, nsel);
      context.push_back("P|" + lead);
      context.push_back("P|" + lead + "|h" + yn(here) + "|o" + yn(outer));
      context.push_back("P|" + lead + "|h" + yn(here) + "|o" + yn(outer) + "|n" +
                        std::to_string(std::min<std::size_t>(tree.actions(pattern).size(), 4)));
      break;
    }
    default:
      break;
  }
  const std::string depth = "d" + std::to_string(std::min<std::size_t>(level, 4));

  std::vector<std::string> clause;
  if (nsel < x.clauses.size()) clause = sorted_unique(x.clauses[nsel].tokens);
  const auto all_tokens = sorted_unique(x.tokens);
  std::optional<FunctionId> best;
  if (kind == SlotKind::kChannel || kind == SlotKind::kFunction) best = best_function(x, nsel);

  std::vector<FunctionId> candidates;
  if (kind == SlotKind::kChannel) candidates = candidate_functions(state, catalog_, limits);

  std::vector<SparseFeatures> out;
  out.reserve(ctx.legal.size());
  for (const Action& a : ctx.legal) {
    SparseFeatures fs;
    const std::string key = action_key(a, kind);
    fs.emplace_back("b|" + key, 1.0);
    fs.emplace_back("k|" + sname + "|" + key, 1.0);
    fs.emplace_back("p|" + prev + "|" + sname + "|" + key, 1.0);
    fs.emplace_back("d|" + sname + "|" + depth + "|" + key, 1.0);
    for (const auto& c : context) fs.emplace_back(c + "|" + key, 1.0);

    if (kind == SlotKind::kChannel) {
      const Channel* ch = catalog_.find_channel(a.token);
      double phrase = 0.0;
      bool has_best = false;
      for (FunctionId id : candidates) {
        if (catalog_.function(id).channel != a.token) continue;
        phrase = std::max(phrase, phrase_overlap(id, clause));
        has_best = has_best || (best && *best == id);
      }
      const auto chan_frag = fragments(ch ? ch->name : a.token);
      fs.emplace_back("lx|chan_phrase", phrase);
      fs.emplace_back("lx|chan_name", coverage(chan_frag, clause));
      fs.emplace_back("lx|chan_name_utt", coverage(chan_frag, all_tokens));
      fs.emplace_back("lx|chan_best", has_best ? 1.0 : 0.0);
      fs.emplace_back("lx|chan_id|" + a.token, 1.0);
    } else if (kind == SlotKind::kFunction) {
      const auto id = catalog_.find_id(FunctionRef{tree.node(slot.node).channel, a.token});
      if (id) {
        fs.emplace_back("lx|fn_phrase", phrase_overlap(*id, clause));
        fs.emplace_back("lx|fn_name", coverage(entries_[*id].name, clause));
        fs.emplace_back("lx|fn_name_utt", coverage(entries_[*id].name, all_tokens));
        fs.emplace_back("lx|fn_best", best && *best == *id ? 1.0 : 0.0);
        fs.emplace_back("lx|fn_id|" + catalog_.function(*id).ref().str(), 1.0);
      }
    }
    out.push_back(std::move(fs));
  }
  return out;
}

}  // namespace wpg
