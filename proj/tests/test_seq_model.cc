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
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "nfclm/error.h"
#include "nfclm/random.h"
#include "nfclm/seq_model.h"
#include "test_util.h"

namespace nfclm {
namespace {

double Sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

TEST_CASE("hand-computed discounted bigram") {
  Vocabulary v = Vocabulary::FromSymbols({"a", "b"});
  std::vector<std::vector<int>> corpus = {v.ParseSymbols("a b"), v.ParseSymbols("a b")};
  NGramOptions o;
  o.order = 2;
  BackoffNGram lm = TrainBackgroundNGram(corpus, v, o);
  const int a = 0, b = 1, eos = v.eos();
  std::vector<int> h = {a};
  // Unigram level: every outcome seen twice in six events -> 1/3 each.
  // Bigram after a: b seen twice; (2 - .75 + .75 * 1/3) / 2 = 0.75.
  CHECK(lm.Prob(b, h) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(lm.Prob(a, h) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(lm.Prob(eos, h) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(lm.Prob(b, h) > lm.Prob(a, h));
  auto dist = lm.Distribution(h);
  CHECK(dist[b] == doctest::Approx(0.75));
  CHECK(std::abs(Sum(dist) - 1.0) < 1e-12);
}

TEST_CASE("symmetric unigram is uniform") {
  Vocabulary v = Vocabulary::FromSymbols({"a", "b", "c", "d"});
  std::vector<std::vector<int>> corpus = {v.ParseSymbols("a b c d"), v.ParseSymbols("d c b a")};
  NGramOptions o;
  o.order = 1;
  BackoffNGram lm = TrainBackgroundNGram(corpus, v, o);
  auto dist = lm.Distribution({});
  for (int w = 0; w < 4; ++w) CHECK(dist[w] == doctest::Approx(dist[0]));
  // Four symbols and EOS: renormalized over V the symbols are 1/4 each.
  CHECK(dist[0] / (1.0 - dist[v.eos()]) == doctest::Approx(0.25));
}

TEST_CASE("empty history gives the unigram-level distribution") {
  Vocabulary v = Vocabulary::FromSymbols({"a", "b"});
  std::vector<std::vector<int>> corpus = {v.ParseSymbols("a a a b")};
  NGramOptions o;
  o.order = 1;
  BackoffNGram uni = TrainBackgroundNGram(corpus, v, o);
  o.order = 3;
  BackoffNGram tri = TrainBackgroundNGram(corpus, v, o);
  // With an empty history the trigram conditions on two BOS pads; it is still
  // strictly positive and normalized.
  auto d = tri.Distribution({});
  for (double p : d) CHECK(p > 0.0);
  CHECK(std::abs(Sum(d) - 1.0) < 1e-12);
  CHECK(uni.Prob(0, {}) > uni.Prob(1, {}));
}

TEST_CASE("Markov truncation") {
  Vocabulary v = Vocabulary::FromSymbols({"a", "b", "c"});
  std::vector<std::vector<int>> corpus = {v.ParseSymbols("a b c a b"), v.ParseSymbols("c c a")};
  BackoffNGram lm = TrainBackgroundNGram(corpus, v, {3, 0.5});
  std::vector<int> longh = {2, 2, 0, 1, 0, 1};
  std::vector<int> shorth = {0, 1};
  CHECK(lm.Distribution(longh) == lm.Distribution(shorth));
}

TEST_CASE("training and query errors") {
  Vocabulary v = Vocabulary::FromSymbols({"a", "b"});
  CHECK_THROWS_AS(TrainBackgroundNGram({}, v, {}), Error);
  CHECK_THROWS_AS(TrainBackgroundNGram({{0, 7}}, v, {}), Error);
  CHECK_THROWS_AS(TrainBackgroundNGram({{0}}, v, {0, 0.5}), Error);
  CHECK_THROWS_AS(TrainBackgroundNGram({{0}}, v, {2, 1.0}), Error);
  BackoffNGram lm = TrainBackgroundNGram({{0, 1}}, v, {});
  std::vector<int> bad = {42};
  try {
    lm.Distribution(bad);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnknownSymbol);
  }
}

TEST_CASE("property: normalization and positivity over random histories") {
  Rng rng(5);
  Vocabulary v = Vocabulary::FromSymbols({"a", "b", "c", "d", "e"});
  std::vector<std::vector<int>> corpus;
  for (int s = 0; s < 30; ++s) {
    std::vector<int> sent;
    const int len = 1 + static_cast<int>(rng.UniformIndex(8));
    for (int i = 0; i < len; ++i) sent.push_back(static_cast<int>(rng.UniformIndex(5)));
    corpus.push_back(sent);
  }
  for (int order = 1; order <= 4; ++order) {
    BackoffNGram lm = TrainBackgroundNGram(corpus, v, {order, 0.75});
    for (int t = 0; t < 100; ++t) {
      std::vector<int> h;
      const int len = static_cast<int>(rng.UniformIndex(6));
      for (int i = 0; i < len; ++i) h.push_back(static_cast<int>(rng.UniformIndex(5)));
      auto d = lm.Distribution(h);
      CHECK(std::abs(Sum(d) - 1.0) <= 1e-9);
      for (int w = 0; w < lm.num_outcomes(); ++w) {
        CHECK(d[w] > 0.0);
        CHECK(d[w] == doctest::Approx(lm.Prob(w, h)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("serialization round trip") {
  Vocabulary v = Vocabulary::FromSymbols({"a", "b", "c"});
  BackoffNGram lm =
      TrainBackgroundNGram({v.ParseSymbols("a b c"), v.ParseSymbols("c b")}, v, {3, 0.6});
  std::string bytes = lm.Serialize();
  BackoffNGram back = BackoffNGram::Deserialize(bytes);
  CHECK(back == lm);
  std::vector<int> h = {0, 1};
  CHECK(back.Distribution(h) == lm.Distribution(h));
  auto generic = DeserializeSymbolModel(bytes);
  CHECK(generic->Distribution(h) == lm.Distribution(h));

  UniformModel u(4);
  CHECK(DeserializeSymbolModel(u.Serialize())->Prob(2, {}) == 0.25);
  CHECK_THROWS_AS(DeserializeSymbolModel("garbage!"), Error);
  CHECK_THROWS_AS(BackoffNGram::Deserialize(bytes.substr(0, bytes.size() / 2)), Error);

  std::ostringstream counts;
  lm.WriteCounts(counts);
  CHECK_FALSE(counts.str().empty());
}

}  // namespace
}  // namespace nfclm
