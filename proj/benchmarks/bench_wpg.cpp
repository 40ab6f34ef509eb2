#include <benchmark/benchmark.h>

#include "wpg/dataset.hpp"
#include "wpg/genflow.hpp"
#include "wpg/parser/beam_search.hpp"
#include "wpg/parser/model.hpp"
#include "wpg/random.hpp"
#include "wpg/surface.hpp"
#include "wpg/transition.hpp"

namespace {

using namespace wpg;

const Catalog& demo() { return builtin_demo_catalog(); }

std::vector<Wast> workflows(std::size_t n) {
  std::vector<Wast> out;
  for (std::size_t i = 0; i < n; ++i) {
    GenConfig cfg;
    cfg.seed = mix_seed(5, i);
    out.push_back(generate_workflow(demo(), cfg));
  }
  return out;
}

struct Trained {
  std::vector<Example> test;
  BaselineModel model;
};

const Trained& trained() {
  static const Trained t = [] {
    GenConfig cfg;
    cfg.seed = 2024;
    auto corpus = generate_examples(demo(), cfg, 600);
    split_dataset(corpus, {0.8, 0.0, 0.2}, 7);
    std::vector<Example> train, test;
    for (auto& e : corpus) (e.split == Split::kTrain ? train : test).push_back(e);
    return Trained{test, train_scorer(train, {}, demo(), {}).model};
  }();
  return t;
}

void BM_Generate(benchmark::State& state) {
  GenConfig cfg;
  cfg.max_depth = static_cast<std::size_t>(state.range(0));
  std::uint64_t i = 0;
  for (auto _ : state) {
    cfg.seed = mix_seed(1, i++);
    benchmark::DoNotOptimize(generate_workflow(demo(), cfg));
  }
}
BENCHMARK(BM_Generate)->Arg(1)->Arg(3)->Arg(5);

void BM_OracleReplay(benchmark::State& state) {
  const auto ws = workflows(256);
  std::size_t i = 0, actions = 0;
  for (auto _ : state) {
    const auto seq = oracle_actions(ws[i++ % ws.size()]);
    actions += seq.size();
    benchmark::DoNotOptimize(replay(seq, demo(), {3, 3}));
  }
  state.counters["actions/s"] = benchmark::Counter(static_cast<double>(actions), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_OracleReplay);

void BM_FormalRoundTrip(benchmark::State& state) {
  const auto ws = workflows(256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_formal_expression(to_formal_expression(ws[i++ % ws.size()]), demo()));
  }
}
BENCHMARK(BM_FormalRoundTrip);

void BM_BeamSearch(benchmark::State& state) {
  const Trained& t = trained();
  const LogLinearScorer scorer(demo(), t.model);
  const BeamOptions options{static_cast<std::size_t>(state.range(0))};
  std::vector<Utterance> xs;
  for (const auto& e : t.test) xs.push_back(tokenize(e.nl));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(beam_search(xs[i++ % xs.size()], demo(), scorer, {3, 3}, options));
  }
}
BENCHMARK(BM_BeamSearch)->Arg(1)->Arg(5)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_TrainEpoch(benchmark::State& state) {
  GenConfig cfg;
  cfg.seed = 9;
  const auto corpus = generate_examples(demo(), cfg, static_cast<std::size_t>(state.range(0)));
  TrainConfig tc;
  tc.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_scorer(corpus, {}, demo(), tc));
}
BENCHMARK(BM_TrainEpoch)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
