// Copyright 2026 The NFCLM Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <sstream>

#include "doctest.h"
#include "nfclm/decider.h"
#include "nfclm/error.h"
#include "nfclm/eval.h"
#include "nfclm/random.h"
#include "test_util.h"

namespace nfclm {
namespace {

// Three symbols plus EOS, uniform background, no entity classes.
NfclmModel UniformFourModel() {
  Vocabulary v = Vocabulary::FromSymbols({"a", "b", "c"});
  ClassAlphabet c = ClassAlphabet::FromLabels({"@bg"});
  std::vector<std::vector<int>> tagged = {v.ParseSymbols("a b c")};
  DeciderModel d = TrainDecider(tagged, tagged, v, c, {});
  return NfclmModel(v, c, std::make_shared<UniformModel>(4), {}, std::move(d));
}

std::vector<NBestEntry> ParseText(const std::string& text, const Vocabulary& v) {
  std::istringstream in(text);
  return ParseNBest(in, v);
}

std::vector<std::string> Hyps(const std::vector<RescoredEntry>& r) {
  std::vector<std::string> out;
  for (const auto& e : r) out.push_back(e.entry.hypothesis);
  return out;
}

TEST_CASE("uniform model over four outcomes has perplexity 4") {
  NfclmModel m = UniformFourModel();
  std::vector<std::vector<int>> corpus = {m.vocab().ParseSymbols("a b c"),
                                          m.vocab().ParseSymbols("c c"),
                                          m.vocab().ParseSymbols("b")};
  auto r = ComputePerplexity(MakeNfclmScorer(m, ScoreMode::kBeam, {}), corpus);
  CHECK(r.perplexity == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r.num_tokens == 9);
  CHECK(r.num_sentences == 3);
  auto bg = ComputePerplexity(MakeBackgroundScorer(m.background(), m.vocab()), corpus);
  CHECK(std::abs(bg.perplexity - 4.0) <= 1e-6);
  auto exact = ComputePerplexity(MakeNfclmScorer(m, ScoreMode::kExact, {}), corpus);
  CHECK(std::abs(exact.perplexity - 4.0) <= 1e-6);
}

TEST_CASE("perplexity is invariant to line order and thread count") {
  Rng rng(31);
  NfclmModel m = testing::RandomModel(rng);
  std::vector<std::vector<int>> corpus;
  for (int i = 0; i < 40; ++i) corpus.push_back(Sample(m, 8, rng.NextU64()));
  auto scorer = MakeNfclmScorer(m, ScoreMode::kBeam, {});
  auto a = ComputePerplexity(scorer, corpus);
  auto shuffled = corpus;
  rng.Shuffle(shuffled);
  auto b = ComputePerplexity(scorer, shuffled);
  CHECK(a.perplexity == doctest::Approx(b.perplexity).epsilon(1e-12));
  PerplexityOptions threaded;
  threaded.threads = 4;
  auto c = ComputePerplexity(scorer, corpus, threaded);
  CHECK(c.total_log_prob == a.total_log_prob);
  auto s1 = ScoreCorpus(scorer, corpus, 1);
  auto s4 = ScoreCorpus(scorer, corpus, 4);
  for (size_t i = 0; i < corpus.size(); ++i) CHECK(s1[i].log_prob == s4[i].log_prob);
}

TEST_CASE("dead sentences are reported and excluded only on request") {
  NfclmModel m = testing::ToyModel();
  BeamOptions narrow;
  narrow.max_hypotheses = 1;
  std::vector<std::vector<int>> corpus = {m.vocab().ParseSymbols("_play _ro _by"),
                                          m.vocab().ParseSymbols("_by")};
  auto scorer = MakeNfclmScorer(m, ScoreMode::kBeam, narrow);
  auto r = ComputePerplexity(scorer, corpus);
  CHECK(r.dead_sentences == std::vector<size_t>{0});
  CHECK(std::isinf(r.perplexity));
  PerplexityOptions skip;
  skip.skip_dead = true;
  auto s = ComputePerplexity(scorer, corpus, skip);
  CHECK(std::isfinite(s.perplexity));
  CHECK(s.num_sentences == 1);
  CHECK(s.num_tokens == 2);
}

TEST_CASE("n-best parsing") {
  NfclmModel m = testing::ToyModel();
  auto e = ParseText("u1\t-1\t-2\t_play _ro sie\nu1\t-3\t-4\t_play nope\nu2\t0\t0\t_by\n",
                     m.vocab());
  REQUIRE(e.size() == 3);
  CHECK(e[0].rank == 0);
  CHECK(e[1].rank == 1);
  CHECK(e[2].rank == 0);
  CHECK_FALSE(e[1].tokenizable);
  CHECK(e[1].error.find("nope") != std::string::npos);
  CHECK_THROWS_AS(ParseText("u1\t-1\t_play\n", m.vocab()), Error);
  CHECK_THROWS_AS(ParseText("u1\tx\t0\t_play\n", m.vocab()), Error);
  CHECK_THROWS_AS(ParseText("u1\tinf\t0\t_play\n", m.vocab()), Error);
  std::istringstream refs("u1\t_play  _ro sie\n");
  CHECK(ParseReferences(refs).at("u1") == "_play _ro sie");
}

TEST_CASE("fusion weights must be finite and non-negative") {
  CHECK_NOTHROW(ValidateFusionWeights({0.0, 0.0}));
  CHECK_THROWS_AS(ValidateFusionWeights({-1.0, 0.0}), Error);
  CHECK_THROWS_AS(ValidateFusionWeights({0.0, INFINITY}), Error);
  NfclmModel m = testing::ToyModel();
  CHECK_THROWS_AS(RescoreNBest(m, {}, {}, ScoreMode::kBeam, {}), Error);
}

TEST_CASE("zero weights keep the ASR ranking") {
  NfclmModel m = testing::ToyModel();
  auto e = ParseText(
      "u\t-5\t-1\t_play _ro sie\nu\t-2\t-9\t_by _browne\nu\t-2\t-3\t_flack\nu\t-7\t0\t_ro\n",
      m.vocab());
  auto r = RescoreNBest(m, e, {0.0, 0.0}, ScoreMode::kBeam, {});
  CHECK(Hyps(r) == std::vector<std::string>{"_by _browne", "_flack", "_play _ro sie", "_ro"});
}

TEST_CASE("fused scores equal hand arithmetic on a 3-entry list") {
  NfclmModel m = testing::ToyModel();
  auto e = ParseText("u\t-4\t-6\t_play _ro sie\nu\t-4.5\t-2\t_by _browne\nu\t-6\t-1\t_flack\n",
                     m.vocab());
  const FusionWeights w{0.6, 0.3};
  auto r = RescoreNBest(m, e, w, ScoreMode::kExact, {});
  for (const auto& x : r) {
    const double lm = SequenceLogProb(m, x.entry.symbols, ScoreMode::kExact).log_prob;
    CHECK(x.lm_log_prob == doctest::Approx(lm).epsilon(1e-12));
    CHECK(x.fused_score ==
          doctest::Approx(x.entry.asr_score + 0.6 * lm - 0.3 * x.entry.ilm_score).epsilon(1e-12));
  }
  for (size_t i = 1; i < r.size(); ++i) CHECK(r[i - 1].fused_score >= r[i].fused_score);
}

TEST_CASE("entity-correct hypothesis overtakes at the hand-computed crossover") {
  NfclmModel m = testing::ToyModel();
  auto e = ParseText(
      "u\t-4\t0\t_play _ro berta _by _browne\nu\t-5\t0\t_play _ro sie _by _browne\n",
      m.vocab());
  const double la = SequenceLogProb(m, e[0].symbols, ScoreMode::kExact).log_prob;
  const double lb = SequenceLogProb(m, e[1].symbols, ScoreMode::kExact).log_prob;
  REQUIRE(lb > la);
  const double crossover = 1.0 / (lb - la);
  auto top = [&](double lambda) {
    return RescoreNBest(m, e, {lambda, 0.0}, ScoreMode::kExact, {})[0].entry.rank;
  };
  CHECK(top(crossover * 0.99) == 0);
  CHECK(top(crossover * 1.01) == 1);
}

TEST_CASE("untokenizable entries rank last with a flag") {
  NfclmModel m = testing::ToyModel();
  auto e = ParseText("u\t10\t0\t_play xyz\nu\t-50\t0\t_by\n", m.vocab());
  auto r = RescoreNBest(m, e, {1.0, 0.0}, ScoreMode::kBeam, {});
  CHECK(r[0].entry.hypothesis == "_by");
  CHECK(r[1].failed);
}

TEST_CASE("property: constant ASR shift leaves the ranking unchanged") {
  NfclmModel m = testing::ToyModel();
  Rng rng(41);
  for (int t = 0; t < 50; ++t) {
    std::vector<NBestEntry> e;
    for (int i = 0; i < 5; ++i) {
      NBestEntry x;
      x.utterance_id = "u";
      x.asr_score = -10 * rng.NextDouble();
      x.ilm_score = -10 * rng.NextDouble();
      x.symbols = Sample(m, 6, rng.NextU64());
      x.hypothesis = m.vocab().JoinSymbols(x.symbols);
      x.rank = i;
      e.push_back(x);
    }
    const FusionWeights w{rng.NextDouble() * 2, rng.NextDouble()};
    auto scored = ScoreNBest(m, e, ScoreMode::kBeam, {});
    auto base = RankNBest(scored, w);
    const double shift = 100 * (rng.NextDouble() - 0.5);
    for (auto& s : scored) s.entry.asr_score += shift;
    auto moved = RankNBest(scored, w);
    for (size_t i = 0; i < base.size(); ++i) CHECK(base[i].entry.rank == moved[i].entry.rank);
  }
}

TEST_CASE("property: raising the LM weight never demotes the best-LM entry") {
  NfclmModel m = testing::ToyModel();
  Rng rng(42);
  for (int t = 0; t < 30; ++t) {
    std::vector<NBestEntry> e;
    for (int i = 0; i < 4; ++i) {
      NBestEntry x;
      x.utterance_id = "u";
      x.asr_score = -3.0;
      x.ilm_score = -1.0;
      x.symbols = Sample(m, 6, rng.NextU64());
      x.hypothesis = m.vocab().JoinSymbols(x.symbols);
      x.rank = i;
      e.push_back(x);
    }
    auto scored = ScoreNBest(m, e, ScoreMode::kBeam, {});
    size_t best = 0;
    int ties = 0;
    for (size_t i = 0; i < scored.size(); ++i) {
      if (scored[i].lm_log_prob > scored[best].lm_log_prob) best = i;
    }
    for (const auto& s : scored) ties += s.lm_log_prob == scored[best].lm_log_prob;
    if (ties > 1) continue;
    size_t previous = scored.size();
    for (double lambda = 0.0; lambda <= 3.0; lambda += 0.25) {
      auto ranked = RankNBest(scored, {lambda, 0.5});
      size_t pos = 0;
      while (ranked[pos].entry.rank != best) ++pos;
      CHECK(pos <= previous);
      previous = pos;
    }
  }
}

}  // namespace
}  // namespace nfclm
