#include "wpg/frontends/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "httplib.h"
#include "wpg/dataset.hpp"
#include "wpg/error.hpp"
#include "wpg/frontends/server.hpp"
#include "wpg/frontends/service.hpp"
#include "wpg/nlgen.hpp"
#include "wpg/parser/evaluate.hpp"
#include "wpg/parser/model.hpp"
#include "wpg/surface.hpp"

namespace wpg::frontends {

namespace {

struct UsageError {
  std::string message;
};

struct CatalogFlags {
  std::string path;  // empty: built-in demo catalog
  std::string mode = "strict";

  void add(CLI::App& cmd) {
    cmd.add_option("--catalog", path, "Catalog JSON file (default: built-in demo catalog)");
    cmd.add_option("--chain-mode", mode, "Chain edges: strict rules or data-kind fallback")
        ->check(CLI::IsMember({"strict", "kind", "kind-fallback"}));
  }

  Catalog load() const {
    const ChainMode m = *chain_mode_from_string(mode);
    return path.empty() ? builtin_demo_catalog().with_mode(m) : load_catalog(path, m);
  }
};

struct DecodeFlags {
  std::size_t beam = 5;
  std::size_t max_depth = 3;
  std::size_t max_branch = 3;

  void add(CLI::App& cmd) {
    cmd.add_option("--beam", beam, "Beam width")->check(CLI::PositiveNumber);
    cmd.add_option("--max-depth", max_depth, "Pattern depth bound used while decoding (0 = none)");
    cmd.add_option("--max-branch", max_branch, "Parallel_Split width bound used while decoding (0 = none)");
  }

  Limits limits() const { return {max_depth, max_branch}; }
};

std::vector<Example> with_split(const std::vector<Example>& all, Split split) {
  std::vector<Example> out;
  for (const auto& e : all) {
    if (e.split == split) out.push_back(e);
  }
  return out;
}

bool all_unassigned(const std::vector<Example>& all) {
  return std::all_of(all.begin(), all.end(), [](const Example& e) { return e.split == Split::kUnassigned; });
}

struct GenerateCmd {
  CatalogFlags catalog;
  GenConfig config;
  std::size_t count = 0;
  std::string out_path;
  std::vector<double> split;
  std::optional<std::uint64_t> split_seed;
  bool stratify = false;
  bool paraphrase = false;
  std::string templates;
  bool keep_duplicates = false;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("generate", "Generate workflows with draft descriptions as JSONL records");
    catalog.add(*cmd);
    cmd->add_option("--count", count, "Number of records")->required();
    cmd->add_option("--out", out_path, "Output JSONL file ('-' for stdout)")->required();
    cmd->add_option("--seed", config.seed, "Base seed");
    cmd->add_option("--max-depth", config.max_depth, "Maximum pattern depth");
    cmd->add_option("--max-branch", config.max_branch, "Maximum Parallel_Split width");
    cmd->add_option("--p-extend", config.p_extend, "Probability of chaining at an action");
    cmd->add_option("--p-split", config.p_split, "Probability of Parallel_Split when extending");
    cmd->add_option("--split", split, "Assign splits with train,dev,test ratios, e.g. 0.8,0.1,0.1")
        ->delimiter(',')
        ->expected(3);
    cmd->add_option("--split-seed", split_seed, "Seed for the split shuffle (default: --seed)");
    cmd->add_flag("--stratify", stratify, "Stratify the split by pattern depth");
    cmd->add_flag("--paraphrase", paraphrase, "Vary connectives in the draft descriptions");
    cmd->add_option("--templates", templates, "Template JSON file for the draft descriptions");
    cmd->add_flag("--keep-duplicates", keep_duplicates, "Keep records whose formal expression repeats");
  }

  int run(std::ostream& out, std::ostream& err) const {
    const Catalog cat = catalog.load();
    CorpusOptions options;
    options.dedupe = !keep_duplicates;
    options.paraphrase = {paraphrase, config.seed};
    if (!templates.empty()) options.templates = load_templates(templates);
    options.on_skip = [&](std::uint64_t seed, const Error& e) {
      err << "skipped draw with seed " << seed << ": " << e.what() << "\n";
    };
    std::vector<Example> records = generate_examples(cat, config, count, options);
    if (records.size() < count) {
      err << "warning: produced " << records.size() << " of " << count
          << " records before the attempt budget ran out\n";
    }
    if (!split.empty()) {
      split_dataset(records, {split[0], split[1], split[2]}, split_seed.value_or(config.seed), stratify);
    }
    if (out_path == "-") {
      emit_records(records, out);
    } else {
      emit_records(records, std::filesystem::path(out_path));
      err << "wrote " << records.size() << " records to " << out_path << "\n";
    }
    return 0;
  }
};

struct OracleCheckCmd {
  CatalogFlags catalog;
  std::string data;
  bool verbose = false;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("oracle-check", "Replay every record and check its formal expression");
    catalog.add(*cmd);
    cmd->add_option("dataset", data, "JSONL dataset")->required();
    cmd->add_flag("--verbose", verbose, "Also list records that pass");
  }

  int run(std::ostream& out, std::ostream&) const {
    const Catalog cat = catalog.load();
    std::ifstream in(data, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + data);
    std::set<std::string> ids;
    std::size_t checked = 0;
    std::size_t failed = 0;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ++checked;
      std::string id = "?";
      try {
        const Example e = example_from_json(line);
        id = e.id;
        if (!ids.insert(e.id).second) throw Error(ErrorCode::kDuplicateId, "duplicate id " + e.id);
        check_record(e, cat);
        if (verbose) out << "ok   line " << n << " " << e.id << ": " << e.actions.size() << " actions\n";
      } catch (const Error& e) {
        ++failed;
        out << "FAIL line " << n << " " << id << ": " << error_code_name(e.code()) << ": " << e.what() << "\n";
      }
    }
    out << "checked " << checked << " records: " << checked - failed << " ok, " << failed << " failed\n";
    return failed == 0 ? 0 : 1;
  }
};

struct TrainCmd {
  CatalogFlags catalog;
  std::string data;
  std::string out_path;
  TrainConfig config;
  std::string optimizer = "adagrad";
  std::size_t max_depth = 3;
  std::size_t max_branch = 3;
  bool verbose = false;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("train", "Train the log-linear scorer on the train split");
    catalog.add(*cmd);
    cmd->add_option("--data", data, "JSONL dataset (train split, or every record if none has a split)")
        ->required();
    cmd->add_option("--out", out_path, "Model JSON file to write")->required();
    cmd->add_option("--epochs", config.epochs, "Passes over the data");
    cmd->add_option("--learning-rate", config.learning_rate, "Step size");
    cmd->add_option("--l2", config.l2, "L2 penalty");
    cmd->add_option("--seed", config.seed, "Minibatch shuffle seed");
    cmd->add_option("--batch-size", config.batch_size, "Minibatch size (0 = full batch)");
    cmd->add_option("--optimizer", optimizer, "adagrad or gd")->check(CLI::IsMember({"adagrad", "gd"}));
    cmd->add_option("--max-depth", max_depth, "Pattern depth bound of the transition system");
    cmd->add_option("--max-branch", max_branch, "Parallel_Split width bound of the transition system");
    cmd->add_flag("--verbose", verbose, "Report every epoch on stderr");
  }

  int run(std::ostream& out, std::ostream& err) const {
    const Catalog cat = catalog.load();
    const std::vector<Example> all = load_records(data, &cat);
    const std::vector<Example> train = all_unassigned(all) ? all : with_split(all, Split::kTrain);
    const std::vector<Example> dev = with_split(all, Split::kDev);
    if (train.empty()) throw UsageError{"no training examples in " + data};
    TrainConfig cfg = config;
    cfg.optimizer = optimizer == "gd" ? Optimizer::kGradientAscent : Optimizer::kAdaGrad;
    cfg.limits = {max_depth, max_branch};
    const TrainResult result = train_scorer(train, dev, cat, cfg, [&](const EpochReport& r) {
      if (!verbose) return;
      err << "epoch " << r.epoch << " objective " << r.objective << " train_ll " << r.train_log_likelihood;
      if (!dev.empty()) err << " dev_ll " << r.dev_log_likelihood;
      err << "\n";
    });
    save_model(result.model, out_path);
    const EpochReport& last = result.epochs.back();
    out << "trained on " << train.size() << " examples (" << dev.size() << " dev): " << result.model.size()
        << " features, train log-likelihood " << last.train_log_likelihood << "\n";
    return 0;
  }
};

struct EvalCmd {
  CatalogFlags catalog;
  DecodeFlags decode;
  std::string data;
  std::string model;
  bool oracle = false;
  std::string split = "auto";
  bool allow_synthetic = false;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval", "Exact match and action accuracy of the parser on a split");
    catalog.add(*cmd);
    decode.add(*cmd);
    cmd->add_option("--data", data, "JSONL dataset")->required();
    auto* m = cmd->add_option("--model", model, "Model JSON file");
    auto* o = cmd->add_flag("--oracle", oracle, "Score with the gold actions instead of a model");
    m->excludes(o);
    cmd->add_option("--split", split, "train, dev, test, all, or auto (test if present, else all)")
        ->check(CLI::IsMember({"train", "dev", "test", "all", "auto"}));
    cmd->add_flag("--allow-synthetic", allow_synthetic, "Accept records whose description was not reviewed");
  }

  int run(std::ostream& out, std::ostream&) const {
    if (model.empty() && !oracle) throw UsageError{"eval needs --model or --oracle"};
    const Catalog cat = catalog.load();
    const std::vector<Example> all = load_records(data, &cat);
    std::vector<Example> selected;
    if (split == "all") {
      selected = all;
    } else if (split == "auto") {
      selected = with_split(all, Split::kTest);
      if (selected.empty()) selected = all;
    } else {
      selected = with_split(all, *split_from_string(split));
    }
    std::optional<LogLinearScorer> scorer;
    if (!oracle) scorer.emplace(cat, load_model(model));
    const ParserBundle bundle{cat, scorer ? &*scorer : nullptr, oracle, decode.limits(), {decode.beam}};
    const Metrics m = evaluate(selected, bundle, {allow_synthetic});
    out << metrics_to_json(m) << "\n";
    return 0;
  }
};

struct ParseCmd {
  CatalogFlags catalog;
  DecodeFlags decode;
  std::string model;
  std::string text;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("parse", "Print the best workflow for a description and its actions");
    catalog.add(*cmd);
    decode.add(*cmd);
    cmd->add_option("--model", model, "Model JSON file")->required();
    cmd->add_option("text", text, "Natural-language description")->required();
  }

  int run(std::ostream& out, std::ostream&) const {
    const Catalog cat = catalog.load();
    const LogLinearScorer scorer(cat, load_model(model));
    const Parse p = parse_text(text, {cat, &scorer, false, decode.limits(), {decode.beam}});
    out << to_formal_expression(p.wast) << "\n";
    for (const auto& a : actions_to_text(p.actions)) out << a << "\n";
    return 0;
  }
};

struct ServeCmd {
  CatalogFlags catalog;
  DecodeFlags decode;
  std::string dataset;
  std::string model;
  std::string host = "127.0.0.1";
  int port = 8080;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("serve", "Run the annotation HTTP service over a dataset file");
    catalog.add(*cmd);
    decode.add(*cmd);
    cmd->add_option("--dataset", dataset, "JSONL dataset to annotate")->required();
    cmd->add_option("--model", model, "Model JSON file enabling /api/parse");
    cmd->add_option("--host", host, "Address to bind");
    cmd->add_option("--port", port, "Port to bind (0 = any free port)")->check(CLI::Range(0, 65535));
  }

  int run(std::ostream& out, std::ostream& err) const {
    std::optional<BaselineModel> weights;
    if (!model.empty()) weights = load_model(model);
    AnnotationService service(dataset, catalog.load(), std::move(weights), {decode.limits(), {decode.beam}});
    for (const auto& [id, why] : service.rejected()) err << "not serving " << id << ": " << why << "\n";
    httplib::Server server;
    mount(server, service);
    const int bound = bind(server, host, port);
    out << "listening on http://" << host << ":" << bound << std::endl;
    return server.listen_after_bind() ? 0 : 1;
  }
};

struct CatalogValidateCmd {
  CatalogFlags catalog;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("catalog-validate", "Load a catalog and report its size");
    cmd->add_option("catalog", catalog.path, "Catalog JSON file")->required();
    cmd->add_option("--chain-mode", catalog.mode, "Chain edges: strict rules or data-kind fallback")
        ->check(CLI::IsMember({"strict", "kind", "kind-fallback"}));
  }

  int run(std::ostream& out, std::ostream&) const {
    const Catalog cat = catalog.load();
    out << "ok: " << cat.channels().size() << " channels, " << cat.function_count() << " functions, "
        << cat.rules().size() << " chain rules\n";
    return 0;
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Workflow Patterns Grammar workbench", "wpg"};
  app.require_subcommand(1);
  GenerateCmd generate;
  OracleCheckCmd oracle_check;
  TrainCmd train;
  EvalCmd eval;
  ParseCmd parse;
  ServeCmd serve;
  CatalogValidateCmd catalog_validate;
  generate.add(app);
  oracle_check.add(app);
  train.add(app);
  eval.add(app);
  parse.add(app);
  serve.add(app);
  catalog_validate.add(app);

  std::vector<std::string> argv_storage{"wpg"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "generate") return generate.run(out, err);
    if (name == "oracle-check") return oracle_check.run(out, err);
    if (name == "train") return train.run(out, err);
    if (name == "eval") return eval.run(out, err);
    if (name == "parse") return parse.run(out, err);
    if (name == "serve") return serve.run(out, err);
    return catalog_validate.run(out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.message << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace wpg::frontends
