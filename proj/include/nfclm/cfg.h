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

#ifndef NFCLM_CFG_H_
#define NFCLM_CFG_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <numeric>
#include <vector>

#include "nfclm/class_fst.h"
#include "nfclm/random.h"
#include "nfclm/vocab.h"

namespace nfclm {

// Single-level pattern grammar: each pattern mixes terminal symbols and
// non-terminal class tokens; each non-terminal expands to one entity of its
// class. Tokens are in the mixed encoding of tagged corpora.
struct CfgPattern {
  std::vector<int> tokens;
  double weight = 1.0;
};

struct CfgGrammar {
  std::vector<CfgPattern> patterns;
  // Keyed by class id.
  std::map<int, std::vector<Entity>> entities;
};

// Pattern file: one pattern per line, space-separated tokens, '@' marking
// non-terminals, optional "\t<weight>". Entity lists are read from
// "<entity_dir>/<class>.txt" for each non-terminal in use.
CfgGrammar ParseGrammar(std::istream& patterns, const std::filesystem::path& entity_dir,
                        const Vocabulary& vocab, const ClassAlphabet& classes);
CfgGrammar LoadGrammar(const std::filesystem::path& pattern_file,
                       const std::filesystem::path& entity_dir, const Vocabulary& vocab,
                       const ClassAlphabet& classes);

size_t MixBackgroundCount(double background_fraction, size_t total);
void CheckMixArguments(size_t num_background, size_t num_cfg, double background_fraction,
                       size_t total);

// Samples a pattern (by weight; uniform by default) and then one entity per
// slot uniformly. Expand and ExpandTagged consume the same random stream, so
// under one seed they pick the same patterns and entities.
std::vector<std::vector<int>> Expand(const CfgGrammar& grammar, const Vocabulary& vocab,
                                     int num_samples, uint64_t seed);
// Each slot is emitted as its class token instead of an entity.
std::vector<std::vector<int>> ExpandTagged(const CfgGrammar& grammar,
                                           const Vocabulary& vocab, int num_samples,
                                           uint64_t seed);

// Exactly round(fraction * total) background items and the rest CFG items,
// each drawn by a seeded shuffle of its source (cycling when a source is
// shorter than needed), then shuffled together. Throws kInvalidArgument for a
// fraction outside [0,1] and kEmptyInput when a needed source is empty.
template <typename Sentence>
std::vector<Sentence> MixCorpora(const std::vector<Sentence>& background,
                                 const std::vector<Sentence>& cfg,
                                 double background_fraction, size_t total, uint64_t seed) {
  CheckMixArguments(background.size(), cfg.size(), background_fraction, total);
  const size_t num_background = MixBackgroundCount(background_fraction, total);
  Rng rng(seed);
  auto draw = [&rng](const std::vector<Sentence>& source, size_t n,
                     std::vector<Sentence>& out) {
    std::vector<size_t> order;
    size_t next = 0;
    for (size_t i = 0; i < n; ++i) {
      if (next == order.size()) {
        order.resize(source.size());
        std::iota(order.begin(), order.end(), size_t{0});
        rng.Shuffle(order);
        next = 0;
      }
      out.push_back(source[order[next++]]);
    }
  };
  std::vector<Sentence> mixed;
  mixed.reserve(total);
  draw(background, num_background, mixed);
  draw(cfg, total - num_background, mixed);
  rng.Shuffle(mixed);
  return mixed;
}

}  // namespace nfclm

#endif  // NFCLM_CFG_H_
