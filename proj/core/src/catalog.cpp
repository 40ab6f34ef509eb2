#include "wpg/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wpg/error.hpp"

namespace wpg {

using nlohmann::json;

namespace {

constexpr std::pair<DataKind, std::string_view> kKindNames[] = {
    {DataKind::kNone, "none"}, {DataKind::kEvent, "event"}, {DataKind::kAudio, "audio"},
    {DataKind::kText, "text"}, {DataKind::kFile, "file"},   {DataKind::kImage, "image"},
    {DataKind::kUrl, "url"},
};

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
  });
}

}  // namespace

std::string_view to_string(DataKind kind) {
  for (auto [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "none";
}

std::optional<DataKind> data_kind_from_string(std::string_view name) {
  for (auto [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(Capability cap) {
  switch (cap) {
    case Capability::kTrigger: return "trigger";
    case Capability::kAction: return "action";
    case Capability::kBoth: return "both";
  }
  return "action";
}

std::optional<Capability> capability_from_string(std::string_view name) {
  if (name == "trigger") return Capability::kTrigger;
  if (name == "action") return Capability::kAction;
  if (name == "both") return Capability::kBoth;
  return std::nullopt;
}

std::string_view to_string(ChainMode mode) {
  return mode == ChainMode::kStrict ? "strict" : "kind";
}

std::optional<ChainMode> chain_mode_from_string(std::string_view name) {
  if (name == "strict") return ChainMode::kStrict;
  if (name == "kind" || name == "kind-fallback") return ChainMode::kKindFallback;
  return std::nullopt;
}

bool chainable(const MacroFunction& f, const MacroFunction& g, std::span<const ChainRule> rules,
               ChainMode mode) {
  if (f.output_kind == DataKind::kNone || !f.can_act() || !g.can_act()) return false;
  const FunctionRef from = f.ref();
  const FunctionRef to = g.ref();
  const bool ruled = std::any_of(rules.begin(), rules.end(), [&](const ChainRule& r) {
    return r.from == from && r.to == to;
  });
  if (ruled) return true;
  return mode == ChainMode::kKindFallback && kinds_compatible(f.output_kind, g.input_kind);
}

Catalog::Catalog(std::vector<Channel> channels, std::vector<ChainRule> rules, ChainMode mode, int version)
    : version_(version), mode_(mode), channels_(std::move(channels)), rules_(std::move(rules)) {
  build_index();
  validate();
  const std::size_t n = index_.size();
  tap_succ_.assign(n, {});
  strict_succ_.assign(n, {});
  fallback_succ_.assign(n, {});
  std::set<ChainRule> rule_set(rules_.begin(), rules_.end());
  for (FunctionId f = 0; f < n; ++f) {
    const MacroFunction& src = function(f);
    for (FunctionId g = 0; g < n; ++g) {
      const MacroFunction& dst = function(g);
      if (!dst.can_act()) continue;
      if (src.can_trigger() && kinds_compatible(src.output_kind, dst.input_kind)) {
        tap_succ_[f].push_back(g);
      }
      if (!src.can_act() || src.output_kind == DataKind::kNone) continue;
      const bool ruled = rule_set.contains(ChainRule{src.ref(), dst.ref()});
      if (ruled) strict_succ_[f].push_back(g);
      if (ruled || kinds_compatible(src.output_kind, dst.input_kind)) fallback_succ_[f].push_back(g);
    }
  }
}

void Catalog::build_index() {
  index_.clear();
  by_ref_.clear();
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    for (std::size_t f = 0; f < channels_[c].functions.size(); ++f) {
      by_ref_.emplace(FunctionRef{channels_[c].name, channels_[c].functions[f].name}, index_.size());
      index_.emplace_back(c, f);
    }
  }
}

void Catalog::validate() const {
  if (version_ != kFormatVersion) {
    throw Error(ErrorCode::kCatalogParse, "unsupported catalog version " + std::to_string(version_));
  }
  std::set<std::string> channel_names;
  for (const auto& ch : channels_) {
    if (!is_identifier(ch.name)) {
      throw Error(ErrorCode::kCatalogParse, "channel name '" + ch.name + "' is not an identifier");
    }
    if (!channel_names.insert(ch.name).second) {
      throw Error(ErrorCode::kCatalogParse, "duplicate channel '" + ch.name + "'");
    }
    std::set<std::string> fn_names;
    for (const auto& fn : ch.functions) {
      if (!is_identifier(fn.name)) {
        throw Error(ErrorCode::kCatalogParse, "function name '" + fn.name + "' is not an identifier");
      }
      if (fn.channel != ch.name) {
        throw Error(ErrorCode::kCatalogParse,
                    "function '" + fn.name + "' claims channel '" + fn.channel + "'");
      }
      if (!fn_names.insert(fn.name).second) {
        throw Error(ErrorCode::kCatalogParse, "duplicate function '" + ch.name + "." + fn.name + "'");
      }
      if (fn.can_trigger() && fn.input_kind != DataKind::kNone) {
        throw Error(ErrorCode::kCapabilityViolation,
                    "trigger-capable function " + fn.ref().str() + " must have input_kind none");
      }
    }
  }
  for (const auto& rule : rules_) {
    const MacroFunction* from = find(rule.from);
    const MacroFunction* to = find(rule.to);
    if (from == nullptr || to == nullptr) {
      throw Error(ErrorCode::kDanglingReference,
                  "chain rule " + rule.from.str() + " -> " + rule.to.str() +
                      " references a missing function");
    }
    if (!from->can_act() || !to->can_act()) {
      throw Error(ErrorCode::kCapabilityViolation,
                  "chain rule " + rule.from.str() + " -> " + rule.to.str() +
                      " must connect action-capable functions");
    }
    if (!kinds_compatible(from->output_kind, to->input_kind)) {
      throw Error(ErrorCode::kCapabilityViolation,
                  "chain rule " + rule.from.str() + " -> " + rule.to.str() +
                      " has incompatible data kinds (" + std::string(to_string(from->output_kind)) +
                      " -> " + std::string(to_string(to->input_kind)) + ")");
    }
  }
}

Catalog Catalog::with_mode(ChainMode mode) const {
  Catalog copy = *this;
  copy.mode_ = mode;
  return copy;
}

Catalog Catalog::restricted_to(std::span<const FunctionRef> keep) const {
  std::set<FunctionRef> wanted(keep.begin(), keep.end());
  std::vector<Channel> channels;
  for (const auto& ch : channels_) {
    Channel out{ch.name, ch.description, {}};
    for (const auto& fn : ch.functions) {
      if (wanted.contains(fn.ref())) out.functions.push_back(fn);
    }
    if (!out.functions.empty()) channels.push_back(std::move(out));
  }
  std::vector<ChainRule> rules;
  for (const auto& r : rules_) {
    if (wanted.contains(r.from) && wanted.contains(r.to)) rules.push_back(r);
  }
  return Catalog(std::move(channels), std::move(rules), mode_, version_);
}

const MacroFunction& Catalog::function(FunctionId id) const {
  const auto [c, f] = index_.at(id);
  return channels_[c].functions[f];
}

std::optional<FunctionId> Catalog::find_id(const FunctionRef& ref) const {
  auto it = by_ref_.find(ref);
  if (it == by_ref_.end()) return std::nullopt;
  return it->second;
}

const MacroFunction* Catalog::find(const FunctionRef& ref) const {
  auto id = find_id(ref);
  return id ? &function(*id) : nullptr;
}

const MacroFunction* Catalog::find(std::string_view channel, std::string_view function) const {
  return find(FunctionRef{std::string(channel), std::string(function)});
}

const Channel* Catalog::find_channel(std::string_view name) const {
  for (const auto& ch : channels_) {
    if (ch.name == name) return &ch;
  }
  return nullptr;
}

bool Catalog::chainable(const MacroFunction& f, const MacroFunction& g) const {
  return wpg::chainable(f, g, rules_, mode_);
}

bool Catalog::has_rule(const FunctionRef& from, const FunctionRef& to) const {
  return std::any_of(rules_.begin(), rules_.end(),
                     [&](const ChainRule& r) { return r.from == from && r.to == to; });
}

// ---------------------------------------------------------------------------
// JSON

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::kCatalogParse, where + ": missing key '" + key + "'");
  }
  return obj.at(key);
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) throw Error(ErrorCode::kCatalogParse, where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

DataKind require_kind(const json& obj, const char* key, const std::string& where) {
  const std::string s = require_string(obj, key, where);
  auto k = data_kind_from_string(s);
  if (!k) throw Error(ErrorCode::kCatalogParse, where + ": unknown data kind '" + s + "'");
  return *k;
}

}  // namespace

Catalog parse_catalog(std::string_view json_text, ChainMode mode) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kCatalogParse, std::string("catalog is not valid JSON: ") + e.what());
  }
  const json& version = require(doc, "version", "catalog");
  if (!version.is_number_integer()) throw Error(ErrorCode::kCatalogParse, "catalog: 'version' must be an integer");
  const json& channels_json = require(doc, "channels", "catalog");
  const json& rules_json = require(doc, "chain_rules", "catalog");
  if (!channels_json.is_array() || !rules_json.is_array()) {
    throw Error(ErrorCode::kCatalogParse, "catalog: 'channels' and 'chain_rules' must be arrays");
  }

  std::vector<Channel> channels;
  for (const json& cj : channels_json) {
    Channel ch;
    ch.name = require_string(cj, "name", "channel");
    const std::string where = "channel " + ch.name;
    ch.description = require_string(cj, "description", where);
    const json& fns = require(cj, "functions", where);
    if (!fns.is_array()) throw Error(ErrorCode::kCatalogParse, where + ": 'functions' must be an array");
    for (const json& fj : fns) {
      MacroFunction fn;
      fn.channel = ch.name;
      fn.name = require_string(fj, "name", where + " function");
      const std::string fwhere = ch.name + "." + fn.name;
      const std::string cap = require_string(fj, "capability", fwhere);
      auto parsed = capability_from_string(cap);
      if (!parsed) throw Error(ErrorCode::kCatalogParse, fwhere + ": unknown capability '" + cap + "'");
      fn.capability = *parsed;
      fn.input_kind = require_kind(fj, "input_kind", fwhere);
      fn.output_kind = require_kind(fj, "output_kind", fwhere);
      fn.phrase = require_string(fj, "phrase", fwhere);
      ch.functions.push_back(std::move(fn));
    }
    channels.push_back(std::move(ch));
  }

  std::vector<ChainRule> rules;
  for (const json& rj : rules_json) {
    const std::string from = require_string(rj, "from", "chain rule");
    const std::string to = require_string(rj, "to", "chain rule");
    auto f = FunctionRef::parse(from);
    auto t = FunctionRef::parse(to);
    if (!f || !t) {
      throw Error(ErrorCode::kCatalogParse, "chain rule endpoints must be Channel.Function: " + from + " -> " + to);
    }
    rules.push_back({*f, *t});
  }
  return Catalog(std::move(channels), std::move(rules), mode, version.get<int>());
}

Catalog load_catalog(const std::filesystem::path& path, ChainMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open catalog file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_catalog(buf.str(), mode);
}

std::string save_catalog(const Catalog& catalog) {
  // ordered_json keeps the documented key order stable across saves.
  using ojson = nlohmann::ordered_json;
  ojson doc;
  doc["version"] = catalog.version();
  ojson channels = ojson::array();
  for (const auto& ch : catalog.channels()) {
    ojson cj;
    cj["name"] = ch.name;
    cj["description"] = ch.description;
    ojson fns = ojson::array();
    for (const auto& fn : ch.functions) {
      ojson fj;
      fj["name"] = fn.name;
      fj["capability"] = std::string(to_string(fn.capability));
      fj["input_kind"] = std::string(to_string(fn.input_kind));
      fj["output_kind"] = std::string(to_string(fn.output_kind));
      fj["phrase"] = fn.phrase;
      fns.push_back(std::move(fj));
    }
    cj["functions"] = std::move(fns);
    channels.push_back(std::move(cj));
  }
  doc["channels"] = std::move(channels);
  ojson rules = ojson::array();
  for (const auto& r : catalog.rules()) {
    ojson rj;
    rj["from"] = r.from.str();
    rj["to"] = r.to.str();
    rules.push_back(std::move(rj));
  }
  doc["chain_rules"] = std::move(rules);
  return doc.dump(2) + "\n";
}

void save_catalog(const Catalog& catalog, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write catalog file " + path.string());
  out << save_catalog(catalog);
}

// ---------------------------------------------------------------------------
// Demo vocabulary

namespace {

MacroFunction fn(const char* channel, const char* name, Capability cap, DataKind in, DataKind out,
                 const char* phrase) {
  return MacroFunction{channel, name, cap, in, out, phrase};
}

}  // namespace

const Catalog& builtin_demo_catalog() {
  static const Catalog catalog = [] {
    using K = DataKind;
    constexpr auto T = Capability::kTrigger;
    constexpr auto A = Capability::kAction;
    std::vector<Channel> channels = {
        {"Android",
         "Android phone events",
         {fn("Android", "Any_Missed_Phone", T, K::kNone, K::kAudio, "any missed phone call occurs on Android"),
          fn("Android", "New_Photo_Taken", T, K::kNone, K::kImage, "a new photo is taken on my Android phone"),
          fn("Android", "Battery_Low", T, K::kNone, K::kEvent, "my Android battery runs low")}},
        {"Watson_API",
         "IBM Watson cognitive services",
         {fn("Watson_API", "Voice_to_Text", A, K::kAudio, K::kText, "convert the voice message to text with Watson API"),
          fn("Watson_API", "Translate_Text", A, K::kText, K::kText, "translate the text into English with Watson API"),
          fn("Watson_API", "Describe_Image", A, K::kImage, K::kText, "describe the picture in words with Watson API")}},
        {"SMS",
         "Text messages",
         {fn("SMS", "Send_Text_to_Me", A, K::kText, K::kNone, "send the text to me by SMS"),
          fn("SMS", "New_SMS_Received", T, K::kNone, K::kText, "a new SMS message is received")}},
        {"Google_Drive",
         "Google Drive storage and spreadsheets",
         {fn("Google_Drive", "Archive_Text_in_Spread_Sheet", A, K::kText, K::kNone,
             "archive the text in a Google Drive spreadsheet"),
          fn("Google_Drive", "Upload_File", A, K::kFile, K::kUrl, "upload the file to Google Drive"),
          fn("Google_Drive", "Save_Photo", A, K::kImage, K::kUrl, "save the photo to Google Drive"),
          fn("Google_Drive", "New_File_in_Folder", T, K::kNone, K::kFile, "a new file appears in my Google Drive folder")}},
        {"Gmail",
         "Email",
         {fn("Gmail", "New_Email_Received", T, K::kNone, K::kText, "a new email arrives in Gmail"),
          fn("Gmail", "New_Attachment", T, K::kNone, K::kFile, "a new email attachment arrives in Gmail"),
          fn("Gmail", "Send_Email_to_Me", A, K::kText, K::kNone, "email the text to me with Gmail"),
          fn("Gmail", "Send_Link_by_Email", A, K::kUrl, K::kNone, "email the link to me with Gmail")}},
        {"Slack",
         "Team chat",
         {fn("Slack", "Post_Message", A, K::kText, K::kNone, "post the text to a Slack channel"),
          fn("Slack", "Share_Link", A, K::kUrl, K::kNone, "share the link in Slack"),
          fn("Slack", "New_Mention", T, K::kNone, K::kText, "someone mentions me on Slack")}},
        {"Dropbox",
         "File hosting",
         {fn("Dropbox", "New_File", T, K::kNone, K::kFile, "a new file is added to Dropbox"),
          fn("Dropbox", "Add_File", A, K::kFile, K::kUrl, "add the file to Dropbox"),
          fn("Dropbox", "Save_Text_File", A, K::kText, K::kFile, "save the text as a document in Dropbox")}},
        {"Bitly",
         "Link shortening",
         {fn("Bitly", "Shorten_URL", A, K::kUrl, K::kUrl, "shorten the link with Bitly")}},
        {"Philips_Hue",
         "Smart lighting",
         {fn("Philips_Hue", "Blink_Lights", A, K::kEvent, K::kNone, "blink the Philips Hue lights"),
          fn("Philips_Hue", "Turn_On_Lights", A, K::kEvent, K::kNone, "turn on the Philips Hue lights")}},
        {"Weather",
         "Weather forecasts",
         {fn("Weather", "Rain_Tomorrow", T, K::kNone, K::kEvent, "rain is forecast for tomorrow"),
          fn("Weather", "Daily_Forecast", T, K::kNone, K::kText, "the daily weather forecast is published")}},
        {"Evernote",
         "Notes",
         {fn("Evernote", "Create_Note", A, K::kText, K::kNone, "create a note with the text in Evernote")}},
    };
    auto rule = [](const char* from, const char* to) {
      return ChainRule{*FunctionRef::parse(from), *FunctionRef::parse(to)};
    };
    std::vector<ChainRule> rules = {
        rule("Watson_API.Voice_to_Text", "SMS.Send_Text_to_Me"),
        rule("Watson_API.Voice_to_Text", "Google_Drive.Archive_Text_in_Spread_Sheet"),
        rule("Watson_API.Voice_to_Text", "Watson_API.Translate_Text"),
        rule("Watson_API.Voice_to_Text", "Slack.Post_Message"),
        rule("Watson_API.Voice_to_Text", "Gmail.Send_Email_to_Me"),
        rule("Watson_API.Voice_to_Text", "Evernote.Create_Note"),
        rule("Watson_API.Translate_Text", "SMS.Send_Text_to_Me"),
        rule("Watson_API.Translate_Text", "Slack.Post_Message"),
        rule("Watson_API.Translate_Text", "Gmail.Send_Email_to_Me"),
        rule("Watson_API.Translate_Text", "Dropbox.Save_Text_File"),
        rule("Watson_API.Describe_Image", "SMS.Send_Text_to_Me"),
        rule("Watson_API.Describe_Image", "Slack.Post_Message"),
        rule("Watson_API.Describe_Image", "Evernote.Create_Note"),
        rule("Google_Drive.Save_Photo", "Gmail.Send_Link_by_Email"),
        rule("Google_Drive.Save_Photo", "Slack.Share_Link"),
        rule("Google_Drive.Save_Photo", "Bitly.Shorten_URL"),
        rule("Google_Drive.Upload_File", "Gmail.Send_Link_by_Email"),
        rule("Google_Drive.Upload_File", "Slack.Share_Link"),
        rule("Dropbox.Add_File", "Slack.Share_Link"),
        rule("Dropbox.Add_File", "Bitly.Shorten_URL"),
        rule("Dropbox.Save_Text_File", "Google_Drive.Upload_File"),
        rule("Bitly.Shorten_URL", "Slack.Share_Link"),
        rule("Bitly.Shorten_URL", "Gmail.Send_Link_by_Email"),
    };
    return Catalog(std::move(channels), std::move(rules));
  }();
  return catalog;
}

std::vector<FunctionRef> example_workflow_functions() {
  return {{"Android", "Any_Missed_Phone"},
          {"Watson_API", "Voice_to_Text"},
          {"SMS", "Send_Text_to_Me"},
          {"Google_Drive", "Archive_Text_in_Spread_Sheet"}};
}

}  // namespace wpg
