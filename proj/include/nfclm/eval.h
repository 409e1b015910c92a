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

#ifndef NFCLM_EVAL_H_
#define NFCLM_EVAL_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nfclm/nfclm.h"

namespace nfclm {

using SentenceScorer = std::function<SequenceScore(std::span<const int>)>;

SentenceScorer MakeNfclmScorer(const NfclmModel& model, ScoreMode mode,
                               const BeamOptions& options);
// Plain left-to-right scoring with a single symbol model, EOS included.
SentenceScorer MakeBackgroundScorer(const ConditionalSymbolModel& model,
                                    const Vocabulary& vocab);

// Scores sentences on up to `threads` workers. The result is in input order
// and does not depend on the thread count.
std::vector<SequenceScore> ScoreCorpus(const SentenceScorer& scorer,
                                       const std::vector<std::vector<int>>& corpus,
                                       int threads = 1);

struct PerplexityOptions {
  // Exclude sentences with a dead history instead of reporting infinity.
  bool skip_dead = false;
  int threads = 1;
};

struct PerplexityResult {
  double perplexity = 0.0;
  double total_log_prob = 0.0;
  // Symbols plus one EOS per counted sentence.
  uint64_t num_tokens = 0;
  size_t num_sentences = 0;
  std::vector<size_t> dead_sentences;
};

// exp(-sum log P / num_tokens). With dead sentences and skip_dead unset the
// perplexity is +inf and dead_sentences lists the offenders.
PerplexityResult ComputePerplexity(const SentenceScorer& scorer,
                                   const std::vector<std::vector<int>>& corpus,
                                   const PerplexityOptions& options = {});

struct FusionWeights {
  double lm = 0.0;   // external LM weight
  double ilm = 0.0;  // internal LM weight, subtracted
};

void ValidateFusionWeights(const FusionWeights& weights);

struct NBestEntry {
  std::string utterance_id;
  double asr_score = 0.0;
  double ilm_score = 0.0;
  std::string hypothesis;     // space-separated symbols as read
  std::vector<int> symbols;   // empty when unparseable
  bool tokenizable = true;
  std::string error;
  size_t rank = 0;            // position within its utterance in the input
};

// "utt-id<TAB>asr<TAB>ilm<TAB>symbols". Structural problems throw
// kMalformedData; unknown hypothesis symbols only flag the entry.
std::vector<NBestEntry> ParseNBest(std::istream& in, const Vocabulary& vocab);
// "utt-id<TAB>symbols".
std::map<std::string, std::string> ParseReferences(std::istream& in);

struct RescoredEntry {
  NBestEntry entry;
  double lm_log_prob = 0.0;
  double fused_score = 0.0;
  // Untokenizable or dead under the LM; ranked after every scored entry.
  bool failed = false;
};

// LM log-probabilities for every entry, computed once.
std::vector<RescoredEntry> ScoreNBest(const NfclmModel& model,
                                      const std::vector<NBestEntry>& entries,
                                      ScoreMode mode, const BeamOptions& options,
                                      int threads = 1);

// fused = asr + lm * log P_lm - ilm * ilm_score. Groups by utterance in
// order of first appearance; within a group sorts by fused score descending,
// ties broken by input rank, failed entries last.
std::vector<RescoredEntry> RankNBest(std::vector<RescoredEntry> scored,
                                     const FusionWeights& weights);

std::vector<RescoredEntry> RescoreNBest(const NfclmModel& model,
                                        const std::vector<NBestEntry>& entries,
                                        const FusionWeights& weights, ScoreMode mode,
                                        const BeamOptions& options);

}  // namespace nfclm

#endif  // NFCLM_EVAL_H_
