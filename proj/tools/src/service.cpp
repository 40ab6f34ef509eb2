#include "wpg/frontends/service.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>

#include "json.hpp"
#include "wpg/error.hpp"
#include "wpg/nlgen.hpp"
#include "wpg/parser/evaluate.hpp"
#include "wpg/surface.hpp"
#include "wpg/transition.hpp"

namespace wpg::frontends {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Thrown inside handlers, turned into {error, message} at the top.
struct HttpError {
  int status;
  std::string code;
  std::string message;
};

HttpResponse error_response(int status, std::string_view code, std::string_view message) {
  return {status, json{{"error", code}, {"message", message}}.dump()};
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedRecord:
    case ErrorCode::kMalformedAction:
    case ErrorCode::kEmptyUtterance:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kLexical:
      return 400;
    case ErrorCode::kIo:
      return 500;
    default:
      return 422;
  }
}

std::string errno_text(const std::string& what, const fs::path& p) {
  return what + " " + p.string() + ": " + std::strerror(errno);
}

void write_all(int fd, std::string_view data, const fs::path& p) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIo, errno_text("cannot write", p));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

void fsync_dir(const fs::path& dir) {
  const int fd = ::open(dir.empty() ? "." : dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

// Write-to-temp, fsync, rename over, fsync the directory.
void write_atomically(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::kIo, errno_text("cannot create", tmp));
  try {
    write_all(fd, content, tmp);
    if (::fsync(fd) != 0) throw Error(ErrorCode::kIo, errno_text("cannot fsync", tmp));
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) throw Error(ErrorCode::kIo, errno_text("cannot rename", tmp));
  fsync_dir(path.parent_path());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> out;
  while (!path.empty()) {
    const auto slash = path.find('/');
    if (slash != 0) out.push_back(path.substr(0, slash));
    if (slash == std::string_view::npos) break;
    path.remove_prefix(slash + 1);
  }
  return out;
}

json parse_body(std::string_view body) {
  json j = json::parse(body.empty() ? std::string_view("{}") : body, nullptr, false);
  if (j.is_discarded()) throw HttpError{400, "bad_json", "request body is not valid JSON"};
  if (!j.is_object()) throw HttpError{400, "bad_request", "request body must be a JSON object"};
  return j;
}

std::string require_text(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    throw HttpError{400, "bad_request", std::string("missing string field '") + key + "'"};
  }
  std::string text = *it;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw HttpError{400, "empty_text", std::string("field '") + key + "' must not be empty"};
  }
  return text;
}

AnnotationStatus target_status(const std::string& op) {
  if (op == "label") return AnnotationStatus::kLabeled;
  if (op == "description") return AnnotationStatus::kDescribed;
  return AnnotationStatus::kReviewed;
}

// Empty when `op` may move a record in `from`; otherwise why not.
std::string transition_problem(AnnotationStatus from, const std::string& op) {
  const bool ok = op == "label"         ? from == AnnotationStatus::kGenerated
                  : op == "description" ? from == AnnotationStatus::kLabeled
                                        : from == AnnotationStatus::kLabeled || from == AnnotationStatus::kDescribed;
  if (ok) return {};
  return "cannot apply '" + op + "' to a record with status " + std::string(to_string(from));
}

// Nodes are the Calls; an edge joins a Call to each action of the pattern it
// triggers (root trigger) or evokes (chained pattern).
json workflow_graph(const Tree& tree) {
  json nodes = json::array();
  json edges = json::array();
  std::map<NodeId, std::size_t> index;
  auto add_node = [&](NodeId call, const char* role) {
    index[call] = nodes.size();
    nodes.push_back({{"id", nodes.size()}, {"function", tree.function_of(call).str()}, {"role", role}});
  };
  std::function<void(NodeId, std::optional<NodeId>)> visit = [&](NodeId pattern, std::optional<NodeId> from) {
    const bool chained = from.has_value();
    if (!chained) {
      from = tree.trigger(pattern);
      add_node(*from, "trigger");
    }
    for (NodeId a : tree.actions(pattern)) {
      add_node(a, "action");
      edges.push_back({{"from", index[*from]},
                       {"to", index[a]},
                       {"pattern", constructor_name(tree.node(pattern).ctor)},
                       {"chained", chained}});
      if (NodeId nx = tree.next(a); nx != kNoNode) visit(nx, a);
    }
  };
  visit(tree.root_pattern(), std::nullopt);
  return {{"nodes", nodes}, {"edges", edges}};
}

std::size_t next_free_index(const std::vector<Example>& records) {
  std::size_t next = records.size();
  for (const auto& e : records) {
    if (e.id.size() > 3 && e.id.starts_with("wf-") &&
        std::all_of(e.id.begin() + 3, e.id.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      next = std::max(next, static_cast<std::size_t>(std::stoull(e.id.substr(3))) + 1);
    }
  }
  return next;
}

}  // namespace

fs::path AnnotationService::journal_path(const fs::path& dataset) {
  fs::path p = dataset;
  p += ".log";
  return p;
}

fs::path AnnotationService::lock_path(const fs::path& dataset) {
  fs::path p = dataset;
  p += ".lock";
  return p;
}

AnnotationService::AnnotationService(fs::path dataset, Catalog catalog, std::optional<BaselineModel> model,
                                     ServiceOptions options)
    : dataset_(std::move(dataset)), catalog_(std::move(catalog)), options_(options) {
  const fs::path lock = lock_path(dataset_);
  lock_fd_ = ::open(lock.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (lock_fd_ < 0) throw Error(ErrorCode::kIo, errno_text("cannot open", lock));
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw Error(ErrorCode::kIo, "dataset is locked by another process: " + dataset_.string());
  }
  try {
    if (!fs::exists(dataset_)) throw Error(ErrorCode::kIo, "dataset not found: " + dataset_.string());
    records_ = parse_records(read_file(dataset_));
    for (std::size_t i = 0; i < records_.size(); ++i) by_id_[records_[i].id] = i;

    const fs::path journal = journal_path(dataset_);
    bool replayed = false;
    if (fs::exists(journal)) {
      const std::string text = read_file(journal);
      std::size_t pos = 0;
      for (std::size_t line = 1; pos < text.size(); ++line) {
        const auto nl = text.find('\n', pos);
        // An unterminated tail was never acknowledged.
        if (nl == std::string::npos) break;
        const std::string entry = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (entry.empty()) continue;
        try {
          apply_entry(entry);
        } catch (const Error& e) {
          throw Error(e.code(), "journal line " + std::to_string(line) + ": " + e.what());
        }
        replayed = true;
      }
    }
    for (const auto& e : records_) {
      try {
        check_record(e, catalog_);
      } catch (const Error& err) {
        rejected_[e.id] = err.what();
      }
    }
    if (replayed) compact();
    journal_fd_ = ::open(journal.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (journal_fd_ < 0) throw Error(ErrorCode::kIo, errno_text("cannot open", journal));
    if (model) scorer_ = std::make_unique<LogLinearScorer>(catalog_, std::move(*model));
  } catch (...) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw;
  }
}

AnnotationService::~AnnotationService() {
  if (journal_fd_ >= 0) ::close(journal_fd_);
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

std::vector<Example> AnnotationService::records() const {
  std::shared_lock lock(mutex_);
  return records_;
}

std::map<std::string, std::string> AnnotationService::rejected() const {
  std::shared_lock lock(mutex_);
  return rejected_;
}

void AnnotationService::compact() {
  std::string text;
  for (const auto& e : records_) {
    text += to_json_line(e);
    text += '\n';
  }
  write_atomically(dataset_, text);
  const fs::path journal = journal_path(dataset_);
  const int fd = ::open(journal.c_str(), O_WRONLY | O_TRUNC | O_CLOEXEC);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

void AnnotationService::append_journal(const std::string& entries) {
  const fs::path journal = journal_path(dataset_);
  const off_t start = ::lseek(journal_fd_, 0, SEEK_END);
  try {
    write_all(journal_fd_, entries, journal);
    if (::fsync(journal_fd_) != 0) throw Error(ErrorCode::kIo, errno_text("cannot fsync", journal));
  } catch (...) {
    if (start >= 0 && ::ftruncate(journal_fd_, start) == 0) ::fsync(journal_fd_);
    throw;
  }
}

// Replay is idempotent: a crash between rewriting the dataset and truncating
// the journal leaves entries whose effect is already in the file.
void AnnotationService::apply_entry(const std::string& text) {
  const json entry = json::parse(text, nullptr, false);
  if (entry.is_discarded() || !entry.is_object() || !entry.contains("op")) {
    throw Error(ErrorCode::kMalformedRecord, "unreadable journal entry");
  }
  const std::string op = entry.value("op", "");
  if (op == "append") {
    Example e = example_from_json(entry.at("record").dump());
    if (const auto it = by_id_.find(e.id); it != by_id_.end()) {
      if (records_[it->second] == e) return;
      throw Error(ErrorCode::kDuplicateId, "duplicate id " + e.id);
    }
    by_id_[e.id] = records_.size();
    records_.push_back(std::move(e));
    return;
  }
  if (op != "label" && op != "description" && op != "review") {
    throw Error(ErrorCode::kMalformedRecord, "unknown journal op '" + op + "'");
  }
  const std::string id = entry.value("id", "");
  const auto it = by_id_.find(id);
  if (it == by_id_.end()) throw Error(ErrorCode::kConsistency, "unknown record " + id);
  Example& e = records_[it->second];
  if (e.status >= target_status(op)) return;
  if (const std::string problem = transition_problem(e.status, op); !problem.empty()) {
    throw Error(ErrorCode::kConsistency, id + ": " + problem);
  }
  if (op == "label") {
    const auto label = usefulness_from_string(entry.value("label", ""));
    if (!label || *label == UsefulnessLabel::kUnlabeled) {
      throw Error(ErrorCode::kMalformedRecord, "bad label in journal");
    }
    e.label = *label;
  } else {
    e.nl = entry.value("nl", "");
  }
  e.status = target_status(op);
}

std::string AnnotationService::task_json(const Example& e) const {
  const Wast w = check_record(e, catalog_);
  json actions = json::array();
  for (const auto& a : actions_to_text(e.actions)) actions.push_back(a);
  const json task = {
      {"id", e.id},
      {"status", to_string(e.status)},
      {"label", to_string(e.label)},
      {"label_meaning", usefulness_meaning(e.label)},
      {"split", to_string(e.split)},
      {"formal", e.formal},
      {"outline", outline(w.tree())},
      {"graph", workflow_graph(w.tree())},
      {"actions", actions},
      {"draft_nl", fuse_descriptions(w, catalog_)},
      {"nl", e.nl},
  };
  return task.dump();
}

HttpResponse AnnotationService::next_task() const {
  std::shared_lock lock(mutex_);
  for (const auto& [id, index] : by_id_) {
    const Example& e = records_[index];
    if (e.status < AnnotationStatus::kReviewed && !rejected_.contains(id)) return {200, task_json(e)};
  }
  return error_response(404, "no_tasks", "every record has been reviewed");
}

HttpResponse AnnotationService::get_task(const std::string& id) const {
  std::shared_lock lock(mutex_);
  const auto it = by_id_.find(id);
  if (it == by_id_.end()) return error_response(404, "not_found", "no record " + id);
  if (const auto r = rejected_.find(id); r != rejected_.end()) {
    return error_response(422, "inconsistent_record", r->second);
  }
  if (records_[it->second].status == AnnotationStatus::kReviewed) {
    return error_response(410, "reviewed", id + " has already been reviewed");
  }
  return {200, task_json(records_[it->second])};
}

HttpResponse AnnotationService::mutate(const std::string& id, const std::string& op, std::string_view body) {
  const json request = parse_body(body);
  json entry = {{"op", op}, {"id", id}};
  if (op == "label") {
    const auto it = request.find("label");
    const auto label = it != request.end() && it->is_string() ? usefulness_from_string(it->get<std::string>())
                                                              : std::nullopt;
    if (!label || *label == UsefulnessLabel::kUnlabeled) {
      throw HttpError{400, "bad_label", "label must be one of \"A\", \"B\", \"C\""};
    }
    entry["label"] = to_string(*label);
  } else {
    entry["nl"] = require_text(request, "nl");
  }

  std::unique_lock lock(mutex_);
  const auto it = by_id_.find(id);
  if (it == by_id_.end()) return error_response(404, "not_found", "no record " + id);
  if (const auto r = rejected_.find(id); r != rejected_.end()) {
    return error_response(422, "inconsistent_record", r->second);
  }
  const std::string problem = transition_problem(records_[it->second].status, op);
  if (!problem.empty()) return error_response(409, "illegal_transition", problem);
  const std::string line = entry.dump();
  append_journal(line + "\n");
  apply_entry(line);
  return {200, task_json(records_[it->second])};
}

HttpResponse AnnotationService::parse(std::string_view body) const {
  const json request = parse_body(body);
  const std::string text = require_text(request, "text");
  if (!scorer_) return error_response(503, "no_model", "the service was started without a trained model");
  std::optional<std::string> gold;
  std::string id;
  if (const auto it = request.find("id"); it != request.end() && !it->is_null()) {
    if (!it->is_string()) throw HttpError{400, "bad_request", "'id' must be a string"};
    id = *it;
    std::shared_lock lock(mutex_);
    const auto rec = by_id_.find(id);
    if (rec == by_id_.end()) return error_response(404, "not_found", "no record " + id);
    gold = records_[rec->second].formal;
  }
  const ParserBundle bundle{catalog_, scorer_.get(), false, options_.limits, options_.beam};
  const Parse p = parse_text(text, bundle);
  json actions = json::array();
  for (const auto& a : actions_to_text(p.actions)) actions.push_back(a);
  json out = {
      {"formal", to_formal_expression(p.wast)},
      {"outline", outline(p.wast.tree())},
      {"actions", actions},
      {"log_score", p.log_score},
  };
  if (gold) {
    out["id"] = id;
    out["match"] = out["formal"] == *gold;
  }
  return {200, out.dump()};
}

HttpResponse AnnotationService::catalog_json() const { return {200, save_catalog(catalog_)}; }

HttpResponse AnnotationService::generate(std::string_view body) {
  const json request = parse_body(body);
  GenConfig config;
  std::size_t count = 1;
  for (const auto& [key, value] : request.items()) {
    const bool integral = value.is_number_unsigned() || (value.is_number_integer() && value.get<long long>() >= 0);
    if (key == "seed" && integral) config.seed = value.get<std::uint64_t>();
    else if (key == "max_depth" && integral) config.max_depth = value.get<std::size_t>();
    else if (key == "max_branch" && integral) config.max_branch = value.get<std::size_t>();
    else if (key == "count" && integral) count = value.get<std::size_t>();
    else if (key == "p_extend" && value.is_number()) config.p_extend = value.get<double>();
    else if (key == "p_split" && value.is_number()) config.p_split = value.get<double>();
    else throw HttpError{400, "bad_request", "unexpected or ill-typed field '" + key + "'"};
  }
  if (count > 10000) throw HttpError{400, "bad_request", "count must be at most 10000"};

  std::unique_lock lock(mutex_);
  CorpusOptions options;
  options.first_index = next_free_index(records_);
  for (const auto& e : records_) options.existing_formals.push_back(e.formal);
  std::size_t skipped = 0;
  options.on_skip = [&](std::uint64_t, const Error&) { ++skipped; };
  const std::vector<Example> fresh = generate_examples(catalog_, config, count, options);

  std::string entries;
  std::vector<std::string> lines;
  json created = json::array();
  for (const auto& e : fresh) {
    lines.push_back(json{{"op", "append"}, {"record", json::parse(to_json_line(e))}}.dump());
    entries += lines.back() + "\n";
    created.push_back(e.id);
  }
  if (!entries.empty()) append_journal(entries);
  for (const auto& line : lines) apply_entry(line);
  return {201, json{{"created", created}, {"skipped", skipped}}.dump()};
}

HttpResponse AnnotationService::handle(std::string_view method, std::string_view target, std::string_view body) {
  const std::string_view path = target.substr(0, target.find('?'));
  const auto seg = split_path(path);
  auto allow = [&](std::string_view wanted) {
    if (method != wanted) throw HttpError{405, "method_not_allowed", std::string(method) + " not allowed here"};
  };
  try {
    if (seg.size() < 2 || seg[0] != "api") throw HttpError{404, "not_found", "no route " + std::string(path)};
    if (seg[1] == "tasks" && seg.size() == 3 && seg[2] == "next") {
      allow("GET");
      return next_task();
    }
    if (seg[1] == "tasks" && seg.size() == 3) {
      allow("GET");
      return get_task(std::string(seg[2]));
    }
    if (seg[1] == "tasks" && seg.size() == 4 &&
        (seg[3] == "label" || seg[3] == "description" || seg[3] == "review")) {
      allow("POST");
      return mutate(std::string(seg[2]), std::string(seg[3]), body);
    }
    if (seg.size() == 2 && seg[1] == "parse") {
      allow("POST");
      return parse(body);
    }
    if (seg.size() == 2 && seg[1] == "catalog") {
      allow("GET");
      return catalog_json();
    }
    if (seg.size() == 2 && seg[1] == "generate") {
      allow("POST");
      return generate(body);
    }
    throw HttpError{404, "not_found", "no route " + std::string(path)};
  } catch (const HttpError& e) {
    return error_response(e.status, e.code, e.message);
  } catch (const Error& e) {
    return error_response(status_for(e.code()), error_code_name(e.code()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

}  // namespace wpg::frontends
