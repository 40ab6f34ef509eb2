#pragma once

#include <stdlib.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "wpg/dataset.hpp"
#include "wpg/parser/model.hpp"

namespace helpers {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;

  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "wpg-test-XXXXXX").string();
    path = mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path operator/(const std::string& name) const { return path / name; }
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::vector<wpg::Example> corpus(std::size_t n, std::uint64_t seed) {
  wpg::GenConfig cfg;
  cfg.seed = seed;
  return wpg::generate_examples(wpg::builtin_demo_catalog(), cfg, n);
}

// Trained once per process; fits the running example's description.
inline const wpg::BaselineModel& small_model() {
  static const wpg::BaselineModel model = [] {
    auto data = corpus(300, 3);
    wpg::split_dataset(data, {0.7, 0.1, 0.2}, 3);
    std::vector<wpg::Example> train;
    for (const auto& e : data) {
      if (e.split == wpg::Split::kTrain) train.push_back(e);
    }
    return wpg::train_scorer(train, {}, wpg::builtin_demo_catalog(), {}).model;
  }();
  return model;
}

}  // namespace helpers
