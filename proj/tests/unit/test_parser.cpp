#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "fixtures.hpp"
#include "wpg/dataset.hpp"
#include "wpg/error.hpp"
#include "wpg/genflow.hpp"
#include "wpg/parser/beam_search.hpp"
#include "wpg/parser/evaluate.hpp"
#include "wpg/parser/model.hpp"
#include "wpg/random.hpp"
#include "wpg/surface.hpp"

using namespace wpg;

namespace {

std::vector<Example> corpus(std::size_t n, std::uint64_t seed, const Catalog& catalog = builtin_demo_catalog()) {
  std::vector<Example> out;
  GenConfig cfg;
  for (std::size_t i = 0; i < n; ++i) {
    cfg.seed = mix_seed(seed, i);
    out.push_back(make_example(example_id(i), generate_workflow(catalog, cfg), catalog, cfg));
  }
  return out;
}

// A model over every feature the corpus fires, with weights in [-scale, scale].
BaselineModel random_model(const std::vector<Example>& examples, const Catalog& catalog, std::uint64_t seed,
                           double scale = 1.0) {
  BaselineModel m;
  compile_examples(examples, catalog, Limits{3, 3}, m, true);
  Rng rng(seed);
  for (double& w : m.weights()) w = scale * (2 * rng.uniform() - 1);
  return m;
}

class ConstantScorer final : public Scorer {
 public:
  std::vector<double> score(const ScoringContext& ctx) const override {
    return std::vector<double>(ctx.legal.size(), 0.0);
  }
};

}  // namespace

TEST_SUITE("tokenizer") {
  TEST_CASE("examples") {
    CHECK(tokenize("Send Text to Me").tokens == std::vector<std::string>{"send", "text", "to", "me"});
    CHECK(tokenize("  A  b. ").tokens == std::vector<std::string>{"a", "b"});
    CHECK(tokenize("use Send_Text_to_Me now").tokens ==
          std::vector<std::string>{"use", "send_text_to_me", "now"});
    CHECK(tokenize("x").size() == 1);
    CHECK_THROWS_AS(tokenize(""), Error);
    CHECK_THROWS_AS(tokenize(" .,; "), Error);
  }

  TEST_CASE("idempotent on its own output") {
    for (const auto& e : corpus(100, 5)) {
      const auto once = tokenize(e.nl).tokens;
      std::string joined;
      for (const auto& t : once) joined += t + " ";
      CHECK(tokenize(joined).tokens == once);
    }
  }

  TEST_CASE("clauses of the running example") {
    const Utterance x = tokenize(fixtures::kW0Nl);
    REQUIRE(x.clauses.size() == 4);
    CHECK(x.clauses[0].lead == Lead::kIf);
    CHECK(x.clauses[1].lead == Lead::kThen);
    CHECK(x.clauses[2].lead == Lead::kSeparately);
    CHECK(x.clauses[3].lead == Lead::kFinally);
    CHECK(x.clauses[2].tokens == std::vector<std::string>{"send", "the", "text", "to", "me", "by", "sms"});
  }

  TEST_CASE("connective synonyms") {
    const auto c = segment_clauses("if it rains then blink, and also post it and lastly email it");
    REQUIRE(c.size() == 4);
    CHECK(c[1].lead == Lead::kThen);
    CHECK(c[2].lead == Lead::kSeparately);
    CHECK(c[3].lead == Lead::kFinally);
  }
}

TEST_SUITE("scorer") {
  TEST_CASE("running example under the uniform scorer") {
    // Two real choices (3-way chained pattern, 2-way split channel).
    const Utterance x = tokenize(fixtures::kW0Nl);
    const double lp = sequence_log_prob(fixtures::w0(), x, UniformScorer{}, fixtures::figure_catalog());
    CHECK(lp == doctest::Approx(-std::log(3.0) - std::log(2.0)).epsilon(1e-12));
  }

  TEST_CASE("oracle scorer gives probability one to gold") {
    const Utterance x = tokenize(fixtures::kW0Nl);
    const OracleScorer oracle(oracle_actions(fixtures::w0()));
    CHECK(sequence_log_prob(fixtures::w0(), x, oracle, builtin_demo_catalog()) == 0.0);
  }

  TEST_CASE("unnormalized scorers are caught") {
    const Utterance x = tokenize(fixtures::kW0Nl);
    CHECK_THROWS_AS(sequence_log_prob(fixtures::w0(), x, ConstantScorer{}, builtin_demo_catalog()), Error);
  }

  TEST_CASE("probabilities over all workflows sum to one") {
    const Catalog& fig = fixtures::figure_catalog();
    const Limits limits{2, 3};
    const Utterance x = tokenize(fixtures::kW0Nl);
    const auto all = enumerate_workflows(fig, limits);
    REQUIRE(all.size() == 5);
    double uniform = 0;
    for (const auto& w : all) uniform += std::exp(sequence_log_prob(w, x, UniformScorer{}, fig, limits));
    CHECK(std::abs(uniform - 1.0) <= 1e-12);

    const LogLinearScorer scorer(fig, random_model(corpus(20, 1), builtin_demo_catalog(), 7, 2.0));
    double total = 0;
    for (const auto& w : all) total += std::exp(sequence_log_prob(w, x, scorer, fig, limits));
    CHECK(std::abs(total - 1.0) <= 1e-9);

    // Larger space: the whole demo catalog at depth 2 with binary splits.
    const Limits small{2, 2};
    const LogLinearScorer demo_scorer(builtin_demo_catalog(),
                                      random_model(corpus(20, 1), builtin_demo_catalog(), 8, 1.0));
    double demo_total = 0;
    std::size_t n = enumerate_workflows(builtin_demo_catalog(), small, [&](const Wast& w) {
      demo_total += std::exp(sequence_log_prob(w, x, demo_scorer, builtin_demo_catalog(), small));
    });
    CHECK(n > 50);
    CHECK(std::abs(demo_total - 1.0) <= 1e-9);
  }

  TEST_CASE("zero weights reproduce the uniform scorer") {
    BaselineModel zero = random_model(corpus(20, 1), builtin_demo_catalog(), 0);
    std::fill(zero.weights().begin(), zero.weights().end(), 0.0);
    const LogLinearScorer scorer(builtin_demo_catalog(), zero);
    const Utterance x = tokenize(fixtures::kW0Nl);
    Rng rng(3);
    const Limits limits{3, 3};
    for (int run = 0; run < 30; ++run) {
      TransitionState s = init_state();
      std::vector<Action> history;
      while (!s.complete()) {
        const auto legal = legal_actions(s, builtin_demo_catalog(), limits);
        const ScoringContext ctx{x, history, s, legal, builtin_demo_catalog(), limits};
        const auto got = scorer.score(ctx);
        const auto want = UniformScorer{}.score(ctx);
        for (std::size_t i = 0; i < legal.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-12);
        history.push_back(legal[rng.below(legal.size())]);
        apply_structural(s, history.back());
      }
    }
  }
}

TEST_SUITE("training") {
  TEST_CASE("analytic gradient matches central differences") {
    const auto examples = corpus(10, 21);
    BaselineModel m;
    const TrainingSet data = compile_examples(examples, builtin_demo_catalog(), Limits{3, 3}, m, true);
    REQUIRE(m.size() > 10);
    Rng rng(99);
    const double l2 = 0.01;
    for (int point = 0; point < 5; ++point) {
      std::vector<double> w(m.size());
      for (double& v : w) v = 2 * rng.uniform() - 1;
      std::vector<double> grad;
      objective(data, w, l2, &grad);
      double diff = 0, norm_a = 0, norm_b = 0;
      for (std::size_t k = 0; k < w.size(); ++k) {
        const double h = 1e-5;
        std::vector<double> hi = w, lo = w;
        hi[k] += h;
        lo[k] -= h;
        const double fd = (objective(data, hi, l2, nullptr) - objective(data, lo, l2, nullptr)) / (2 * h);
        diff += (fd - grad[k]) * (fd - grad[k]);
        norm_a += grad[k] * grad[k];
        norm_b += fd * fd;
      }
      CHECK(std::sqrt(diff) / std::max({std::sqrt(norm_a), std::sqrt(norm_b), 1e-12}) <= 1e-6);
    }
  }

  TEST_CASE("small-step gradient ascent never lowers the objective") {
    const auto examples = corpus(10, 33);
    TrainConfig cfg;
    cfg.optimizer = Optimizer::kGradientAscent;
    cfg.learning_rate = 0.05;
    cfg.epochs = 40;
    cfg.l2 = 1e-3;
    const TrainResult r = train_scorer(examples, {}, builtin_demo_catalog(), cfg);
    REQUIRE(r.epochs.size() == 41);
    for (std::size_t i = 1; i < r.epochs.size(); ++i) {
      CHECK(r.epochs[i].objective >= r.epochs[i - 1].objective - 1e-8);
    }
    CHECK(r.epochs.back().objective > r.epochs.front().objective);
    CHECK(std::isnan(r.epochs.back().dev_log_likelihood));
  }

  TEST_CASE("training is deterministic") {
    const auto examples = corpus(30, 2);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 7;
    cfg.seed = 4;
    const auto a = train_scorer(examples, {}, builtin_demo_catalog(), cfg);
    const auto b = train_scorer(examples, {}, builtin_demo_catalog(), cfg);
    CHECK(a.model == b.model);
  }

  TEST_CASE("bad inputs") {
    CHECK_THROWS_AS(train_scorer({}, {}, builtin_demo_catalog(), TrainConfig{}), Error);
    TrainConfig blowup;
    blowup.optimizer = Optimizer::kGradientAscent;
    blowup.learning_rate = 1e308;
    blowup.epochs = 3;
    try {
      train_scorer(corpus(5, 1), {}, builtin_demo_catalog(), blowup);
      FAIL("expected a non-finite loss");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNonFiniteLoss);
    }
  }

  TEST_CASE("model file round-trip") {
    const BaselineModel m = random_model(corpus(5, 1), builtin_demo_catalog(), 1);
    const std::string text = model_to_json(m);
    CHECK(model_from_json(text) == m);
    CHECK(text.find(R"("tokenizer":"v1")") != std::string::npos);
    CHECK_THROWS_AS(model_from_json("{}"), Error);
    CHECK_THROWS_AS(model_from_json(R"({"version":2,"feature_names":[],"weights":[],"tokenizer":"v1"})"), Error);
    CHECK_THROWS_AS(model_from_json(R"({"version":1,"feature_names":["a"],"weights":[],"tokenizer":"v1"})"), Error);
  }
}

TEST_SUITE("beam") {
  TEST_CASE("unbounded beam ranks exactly like exhaustive enumeration") {
    const Limits limits{2, 2};
    const Catalog& demo = builtin_demo_catalog();
    const LogLinearScorer scorer(demo, random_model(corpus(20, 1), demo, 17, 1.0));
    const Utterance x = tokenize("If a new email arrives in Gmail, then translate the text, and separately post it");
    std::vector<std::pair<double, std::string>> expected;
    enumerate_workflows(demo, limits, [&](const Wast& w) {
      expected.emplace_back(sequence_log_prob(w, x, scorer, demo, limits), to_formal_expression(w));
    });
    std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    BeamOptions opt;
    opt.width = kUnboundedBeam;
    const auto parses = beam_search(x, demo, scorer, limits, opt);
    REQUIRE(parses.size() == expected.size());
    for (std::size_t i = 0; i < parses.size(); ++i) {
      CHECK(parses[i].log_score == doctest::Approx(expected[i].first).epsilon(1e-9));
      const bool apart_above = i == 0 || expected[i - 1].first - expected[i].first > 1e-9;
      const bool apart_below = i + 1 == parses.size() || expected[i].first - expected[i + 1].first > 1e-9;
      if (apart_above && apart_below) {
        CHECK(to_formal_expression(parses[i].wast) == expected[i].second);
      }
    }
  }

  TEST_CASE("width one is greedy decoding") {
    const auto train = corpus(60, 4);
    TrainConfig cfg;
    cfg.epochs = 10;
    const LogLinearScorer scorer(builtin_demo_catalog(), train_scorer(train, {}, builtin_demo_catalog(), cfg).model);
    BeamOptions one;
    one.width = 1;
    for (const auto& e : corpus(40, 77)) {
      const Utterance x = tokenize(e.nl);
      const auto beam = beam_search(x, builtin_demo_catalog(), scorer, {3, 3}, one);
      const Parse greedy = greedy_decode(x, builtin_demo_catalog(), scorer, {3, 3});
      REQUIRE(beam.size() == 1);
      CHECK(beam[0].actions == greedy.actions);
      CHECK(beam[0].log_score == doctest::Approx(greedy.log_score).epsilon(1e-12));
    }
  }

  TEST_CASE("oracle scorer decodes gold with score zero") {
    for (const auto& e : corpus(30, 8)) {
      const OracleScorer oracle(e.actions);
      const auto parses = beam_search(tokenize(e.nl), builtin_demo_catalog(), oracle, {3, 3});
      REQUIRE(!parses.empty());
      CHECK(parses[0].actions == e.actions);
      CHECK(parses[0].log_score == 0.0);
    }
  }

  TEST_CASE("every returned parse is valid and beams are well ordered") {
    const Catalog& demo = builtin_demo_catalog();
    const LogLinearScorer scorer(demo, random_model(corpus(20, 1), demo, 5, 3.0));
    for (const auto& e : corpus(20, 9)) {
      const auto parses = beam_search(tokenize(e.nl), demo, scorer, {3, 3});
      CHECK(parses.size() <= 5);
      for (std::size_t i = 0; i < parses.size(); ++i) {
        CHECK(validate_wast(parses[i].wast, demo, {3, 3}).empty());
        CHECK(parses[i].log_score ==
              doctest::Approx(sequence_log_prob(parses[i].actions, tokenize(e.nl), scorer, demo, {3, 3})));
        if (i > 0) CHECK(parses[i - 1].log_score >= parses[i].log_score);
      }
    }
  }

  TEST_CASE("step budget") {
    BeamOptions tiny;
    tiny.max_steps = 3;
    CHECK_THROWS_AS(beam_search(tokenize("anything"), builtin_demo_catalog(), UniformScorer{}, {3, 3}, tiny), Error);
    CHECK(default_max_steps({3, 3}) == 4 * (1 + 5 + 15 + 45));
  }
}

TEST_SUITE("evaluate") {
  TEST_CASE("oracle scorer is exact") {
    auto examples = corpus(50, 12);
    const ParserBundle bundle{builtin_demo_catalog(), nullptr, true};
    const Metrics m = evaluate(examples, bundle, {true});
    CHECK(m.exact_match == 1.0);
    CHECK(m.action_accuracy == 1.0);
    CHECK(m.n == 50);
    std::size_t n = 0;
    for (const auto& [d, v] : m.per_depth) n += v.n;
    CHECK(n == 50);
    const std::string json = metrics_to_json(m);
    for (const char* key : {"exact_match", "action_accuracy", "per_depth", "\"n\""}) {
      CHECK(json.find(key) != std::string::npos);
    }
  }

  TEST_CASE("uniform scorer is not exact when choices exist") {
    const UniformScorer uniform;
    const ParserBundle bundle{builtin_demo_catalog(), &uniform};
    CHECK(evaluate(corpus(100, 13), bundle, {true}).exact_match < 1.0);
  }

  TEST_CASE("guards") {
    const UniformScorer uniform;
    const ParserBundle bundle{builtin_demo_catalog(), &uniform};
    CHECK_THROWS_AS(evaluate({}, bundle, {true}), Error);
    try {
      evaluate(corpus(3, 1), bundle, {false});
      FAIL("expected unreviewed error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnreviewed);
    }
    auto reviewed = corpus(3, 1);
    for (auto& e : reviewed) e.status = AnnotationStatus::kReviewed;
    CHECK_NOTHROW(evaluate(reviewed, bundle));
  }
}
