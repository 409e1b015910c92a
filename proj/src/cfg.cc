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

#include "nfclm/cfg.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "nfclm/error.h"
#include "nfclm/random.h"
#include "nfclm/text_io.h"

namespace nfclm {

CfgGrammar ParseGrammar(std::istream& patterns, const std::filesystem::path& entity_dir,
                        const Vocabulary& vocab, const ClassAlphabet& classes) {
  CfgGrammar grammar;
  std::set<int> used;
  size_t line_no = 0;
  std::vector<std::string> lines = ReadLines(patterns);
  while (!lines.empty() && Trim(lines.back()).empty()) lines.pop_back();
  for (const std::string& line : lines) {
    ++line_no;
    std::string_view body = line;
    CfgPattern pattern;
    size_t tab = body.find('\t');
    if (tab != std::string_view::npos) {
      std::string_view w = Trim(body.substr(tab + 1));
      auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), pattern.weight);
      if (ec != std::errc() || ptr != w.data() + w.size() || !(pattern.weight > 0.0) ||
          !std::isfinite(pattern.weight)) {
        throw Error(ErrorKind::kInvalidArgument,
                    "bad pattern weight on line " + std::to_string(line_no));
      }
      body = body.substr(0, tab);
    }
    auto tokens = SplitWhitespace(body);
    if (tokens.empty()) {
      throw Error(ErrorKind::kEmptyPattern, "pattern line " + std::to_string(line_no));
    }
    for (std::string_view tok : tokens) {
      if (tok.front() == '@') {
        auto c = classes.Find(tok);
        if (!c || classes.IsBackground(*c)) {
          throw Error(ErrorKind::kUnknownSymbol,
                      "non-terminal '" + std::string(tok) + "' on pattern line " +
                          std::to_string(line_no));
        }
        pattern.tokens.push_back(vocab.class_token_base() + *c);
        used.insert(*c);
      } else {
        auto id = vocab.Find(tok);
        if (!id) {
          throw Error(ErrorKind::kUnknownSymbol,
                      "terminal '" + std::string(tok) + "' on pattern line " +
                          std::to_string(line_no));
        }
        pattern.tokens.push_back(*id);
      }
    }
    grammar.patterns.push_back(std::move(pattern));
  }
  if (grammar.patterns.empty()) throw Error(ErrorKind::kEmptyPattern, "pattern file has no patterns");
  for (int c : used) {
    std::filesystem::path file = entity_dir / (classes.Label(c) + ".txt");
    std::ifstream in(file);
    if (!in) {
      throw Error(ErrorKind::kMissingEntities,
                  "non-terminal " + classes.Label(c) + " has no entity file " + file.string());
    }
    std::vector<Entity> entities = ParseEntities(in, vocab);
    if (entities.empty()) {
      throw Error(ErrorKind::kMissingEntities,
                  "non-terminal " + classes.Label(c) + " has an empty entity list");
    }
    grammar.entities.emplace(c, std::move(entities));
  }
  return grammar;
}

CfgGrammar LoadGrammar(const std::filesystem::path& pattern_file,
                       const std::filesystem::path& entity_dir, const Vocabulary& vocab,
                       const ClassAlphabet& classes) {
  std::ifstream in(pattern_file);
  if (!in) throw Error(ErrorKind::kIo, "cannot open pattern file " + pattern_file.string());
  return ParseGrammar(in, entity_dir, vocab, classes);
}

namespace {

std::vector<std::vector<int>> Generate(const CfgGrammar& grammar, const Vocabulary& vocab,
                                       int num_samples, uint64_t seed, bool tagged) {
  if (num_samples < 1) throw Error(ErrorKind::kInvalidArgument, "need at least one sample");
  if (grammar.patterns.empty()) throw Error(ErrorKind::kEmptyPattern, "grammar has no patterns");
  std::vector<double> weights;
  bool uniform = true;
  for (const auto& p : grammar.patterns) {
    weights.push_back(p.weight);
    uniform = uniform && p.weight == grammar.patterns.front().weight;
  }
  Rng rng(seed);
  std::vector<std::vector<int>> out;
  out.reserve(num_samples);
  for (int i = 0; i < num_samples; ++i) {
    const size_t pick = uniform ? rng.UniformIndex(grammar.patterns.size())
                                : rng.Categorical(weights);
    std::vector<int> sentence;
    for (int tok : grammar.patterns[pick].tokens) {
      if (tok < vocab.class_token_base()) {
        sentence.push_back(tok);
        continue;
      }
      const auto& entities = grammar.entities.at(tok - vocab.class_token_base());
      const Entity& e = entities[rng.UniformIndex(entities.size())];
      if (tagged) {
        sentence.push_back(tok);
      } else {
        sentence.insert(sentence.end(), e.symbols.begin(), e.symbols.end());
      }
    }
    out.push_back(std::move(sentence));
  }
  return out;
}

}  // namespace

std::vector<std::vector<int>> Expand(const CfgGrammar& grammar, const Vocabulary& vocab,
                                     int num_samples, uint64_t seed) {
  return Generate(grammar, vocab, num_samples, seed, false);
}

std::vector<std::vector<int>> ExpandTagged(const CfgGrammar& grammar,
                                           const Vocabulary& vocab, int num_samples,
                                           uint64_t seed) {
  return Generate(grammar, vocab, num_samples, seed, true);
}

size_t MixBackgroundCount(double background_fraction, size_t total) {
  return static_cast<size_t>(std::llround(background_fraction * static_cast<double>(total)));
}

void CheckMixArguments(size_t num_background, size_t num_cfg, double background_fraction,
                       size_t total) {
  if (!(background_fraction >= 0.0 && background_fraction <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "background fraction must lie in [0,1]");
  }
  const size_t want_background = MixBackgroundCount(background_fraction, total);
  if (want_background > 0 && num_background == 0) {
    throw Error(ErrorKind::kEmptyInput, "mix needs background sentences");
  }
  if (total - want_background > 0 && num_cfg == 0) {
    throw Error(ErrorKind::kEmptyInput, "mix needs CFG sentences");
  }
}

}  // namespace nfclm
