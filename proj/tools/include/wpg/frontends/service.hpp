#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "wpg/catalog.hpp"
#include "wpg/dataset.hpp"
#include "wpg/parser/beam_search.hpp"
#include "wpg/parser/model.hpp"

namespace wpg::frontends {

struct HttpResponse {
  int status = 200;
  std::string body;  // JSON
};

struct ServiceOptions {
  Limits limits{3, 3};
  BeamOptions beam;
};

/// The annotation loop over one dataset file. Every mutation is appended to
/// `<dataset>.log` and fsync'ed before it is acknowledged; the journal is
/// folded back into the dataset on the next start. `<dataset>.lock` holds an
/// exclusive advisory lock for the lifetime of the service.
class AnnotationService {
 public:
  // Throws wpg::Error(kIo) when the dataset is missing or locked, and the
  // usual record errors when it does not load.
  AnnotationService(std::filesystem::path dataset, Catalog catalog, std::optional<BaselineModel> model = {},
                    ServiceOptions options = {});
  ~AnnotationService();

  AnnotationService(const AnnotationService&) = delete;
  AnnotationService& operator=(const AnnotationService&) = delete;

  // Routes one request. `target` may carry a query string, which is ignored.
  HttpResponse handle(std::string_view method, std::string_view target, std::string_view body);

  std::vector<Example> records() const;
  // Records that failed replay at startup, id -> reason. Never served.
  std::map<std::string, std::string> rejected() const;
  bool has_model() const { return scorer_ != nullptr; }

  static std::filesystem::path journal_path(const std::filesystem::path& dataset);
  static std::filesystem::path lock_path(const std::filesystem::path& dataset);

 private:
  HttpResponse next_task() const;
  HttpResponse get_task(const std::string& id) const;
  HttpResponse mutate(const std::string& id, const std::string& op, std::string_view body);
  HttpResponse parse(std::string_view body) const;
  HttpResponse catalog_json() const;
  HttpResponse generate(std::string_view body);

  std::string task_json(const Example& e) const;
  // Applies a journal entry to the in-memory records; throws on an illegal
  // transition. Used both live and during replay.
  void apply_entry(const std::string& entry);
  void append_journal(const std::string& entry);
  void compact();

  std::filesystem::path dataset_;
  Catalog catalog_;
  ServiceOptions options_;
  std::unique_ptr<LogLinearScorer> scorer_;

  mutable std::shared_mutex mutex_;
  std::vector<Example> records_;
  std::map<std::string, std::size_t> by_id_;  // sorted: next task = lowest id
  std::map<std::string, std::string> rejected_;
  int lock_fd_ = -1;
  int journal_fd_ = -1;
};

}  // namespace wpg::frontends
