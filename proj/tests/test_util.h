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

// Shared builders for the unit and acceptance tests: the toy music model and
// randomly generated small models.

#ifndef NFCLM_TESTS_TEST_UTIL_H_
#define NFCLM_TESTS_TEST_UTIL_H_

#include <memory>
#include <string>
#include <vector>

#include "nfclm/class_fst.h"
#include "nfclm/decider.h"
#include "nfclm/nfclm.h"
#include "nfclm/random.h"
#include "nfclm/seq_model.h"
#include "nfclm/vocab.h"

namespace nfclm::testing {

inline std::string FixtureDir() { return NFCLM_FIXTURE_DIR; }

inline Vocabulary ToyVocab() {
  return Vocabulary::FromSymbols(
      {"_play", "_ro", "sie", "_by", "_browne", "salie", "berta", "_flack"});
}

inline ClassAlphabet ToyClasses() { return ClassAlphabet::FromLabels({"@bg", "@song", "@artist"}); }

inline std::vector<Entity> Entities(const Vocabulary& v,
                                    const std::vector<std::string>& lines) {
  std::vector<Entity> out;
  for (const auto& l : lines) out.push_back({v.ParseSymbols(l), 1.0});
  return out;
}

inline ClassFst ToySongFst(const Vocabulary& v) {
  return ClassFst::Build("@song", Entities(v, {"_ro sie", "_ro salie"}));
}

inline ClassFst ToyArtistFst(const Vocabulary& v) {
  return ClassFst::Build("@artist", Entities(v, {"_ro berta _flack", "_browne"}));
}

inline DeciderModel ToyDecider(const Vocabulary& v, const ClassAlphabet& c,
                               double floor = 1e-3) {
  std::vector<std::vector<int>> tagged = {
      ParseTaggedSentence("_play @song _by @artist", v, c),
      ParseTaggedSentence("_play @song", v, c),
      ParseTaggedSentence("_play _by @artist", v, c),
  };
  DeciderOptions options;
  options.order = 3;
  options.floor = floor;
  return TrainDecider(tagged, tagged, v, c, options);
}

// Uniform background over the eight symbols plus EOS.
inline NfclmModel ToyModel() {
  Vocabulary v = ToyVocab();
  ClassAlphabet c = ToyClasses();
  std::vector<ClassFst> fsts = {ToySongFst(v), ToyArtistFst(v)};
  DeciderModel d = ToyDecider(v, c);
  auto bg = std::make_shared<UniformModel>(v.num_outcomes());
  return NfclmModel(std::move(v), std::move(c), std::move(bg), std::move(fsts), std::move(d));
}

inline std::vector<int> ToyPath(const NfclmModel& m) {
  return m.vocab().ParseSymbols("_play _ro sie _by _browne");
}

// Beam settings wide enough to keep every alignment of short histories.
inline BeamOptions ExhaustiveBeam() {
  BeamOptions o;
  o.max_hypotheses = 10000;
  o.delta = 1e9;
  return o;
}

struct RandomModelOptions {
  int min_vocab = 3;
  int max_vocab = 12;
  int min_classes = 2;  // including @bg
  int max_classes = 3;
  int max_entities = 5;
  int max_entity_length = 6;
};

// Random instance: bigram background and decider trained on random corpora,
// random entity tries over the same vocabulary.
inline NfclmModel RandomModel(Rng& rng, const RandomModelOptions& o = {}) {
  const int nv = o.min_vocab + static_cast<int>(rng.UniformIndex(o.max_vocab - o.min_vocab + 1));
  const int nc =
      o.min_classes + static_cast<int>(rng.UniformIndex(o.max_classes - o.min_classes + 1));
  std::vector<std::string> symbols;
  for (int i = 0; i < nv; ++i) symbols.push_back("s" + std::to_string(i));
  std::vector<std::string> labels = {"@bg"};
  for (int i = 1; i < nc; ++i) labels.push_back("@c" + std::to_string(i));
  Vocabulary v = Vocabulary::FromSymbols(symbols);
  ClassAlphabet c = ClassAlphabet::FromLabels(labels);

  auto random_symbol = [&] { return static_cast<int>(rng.UniformIndex(nv)); };
  std::vector<ClassFst> fsts;
  for (int k = 1; k < nc; ++k) {
    std::vector<Entity> entities;
    const int ne = 1 + static_cast<int>(rng.UniformIndex(o.max_entities));
    for (int e = 0; e < ne; ++e) {
      Entity ent;
      const int len = 1 + static_cast<int>(rng.UniformIndex(o.max_entity_length));
      for (int i = 0; i < len; ++i) ent.symbols.push_back(random_symbol());
      ent.count = 1.0 + static_cast<double>(rng.UniformIndex(3));
      entities.push_back(std::move(ent));
    }
    fsts.push_back(ClassFst::Build(labels[k], std::move(entities)));
  }

  std::vector<std::vector<int>> plain, tagged;
  for (int s = 0; s < 20; ++s) {
    std::vector<int> p, t;
    const int len = 1 + static_cast<int>(rng.UniformIndex(6));
    for (int i = 0; i < len; ++i) {
      p.push_back(random_symbol());
      if (nc > 1 && rng.UniformIndex(3) == 0) {
        t.push_back(v.class_token_base() + 1 + static_cast<int>(rng.UniformIndex(nc - 1)));
      } else {
        t.push_back(random_symbol());
      }
    }
    plain.push_back(std::move(p));
    tagged.push_back(std::move(t));
  }
  NGramOptions ng;
  ng.order = 2;
  auto bg = std::make_shared<BackoffNGram>(TrainBackgroundNGram(plain, v, ng));
  DeciderOptions dopt;
  dopt.order = 2;
  dopt.floor = 1e-3;
  DeciderModel d = TrainDecider(tagged, tagged, v, c, dopt);
  return NfclmModel(std::move(v), std::move(c), std::move(bg), std::move(fsts), std::move(d));
}

inline std::vector<int> RandomHistory(Rng& rng, const NfclmModel& m, int max_length) {
  std::vector<int> h;
  const int len = static_cast<int>(rng.UniformIndex(max_length + 1));
  for (int i = 0; i < len; ++i) h.push_back(static_cast<int>(rng.UniformIndex(m.vocab().size())));
  return h;
}

}  // namespace nfclm::testing

#endif  // NFCLM_TESTS_TEST_UTIL_H_
