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

#ifndef NFCLM_DECIDER_H_
#define NFCLM_DECIDER_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nfclm/seq_model.h"

namespace nfclm {

class ClassAlphabet;
class Vocabulary;

// P'(c) proportional to raw(c) / prior(c)^alpha, renormalized over C.
// Throws kInvalidArgument on a non-positive prior entry or negative alpha.
std::vector<double> RenormalizeByPrior(std::span<const double> raw,
                                       std::span<const double> prior, double alpha);

struct DeciderOptions {
  int order = 3;
  double discount = 0.75;
  double alpha = 1.0;
  // Per-class floor mixed into the raw n-gram output.
  double floor = 1e-6;
};

// Class predictor P_D(c | decider history). Histories mix vocabulary ids and
// class tokens (Vocabulary::class_token_base() + class id); outcomes are
// class ids.
class DeciderModel {
 public:
  DeciderModel(BackoffNGram ngram, std::vector<double> prior, double alpha, double floor);

  int num_classes() const { return ngram_.num_outcomes(); }
  const std::vector<double>& prior() const { return prior_; }
  double alpha() const { return alpha_; }
  void set_alpha(double alpha);
  double floor() const { return floor_; }
  const BackoffNGram& ngram() const { return ngram_; }

  // Floored n-gram output, before prior renormalization.
  std::vector<double> RawDistribution(std::span<const int> history) const;
  std::vector<double> Distribution(std::span<const int> history) const;

  std::string Serialize() const;
  static DeciderModel Deserialize(std::string_view bytes);

 private:
  BackoffNGram ngram_;
  std::vector<double> prior_;
  double alpha_;
  double floor_;
};

// "_play @song _by @artist" -> mixed token ids. "@bg" is not a valid inline
// token: background positions are written as their symbols.
std::vector<int> ParseTaggedSentence(std::string_view line, const Vocabulary& vocab,
                                     const ClassAlphabet& classes);
std::string FormatTaggedSentence(std::span<const int> tokens, const Vocabulary& vocab,
                                 const ClassAlphabet& classes);

// Class frequencies over token positions, with ordinary symbols counted as
// @bg. Add-one smoothed so that every class keeps a positive prior.
std::vector<double> ClassPrior(const std::vector<std::vector<int>>& tagged,
                               const Vocabulary& vocab, const ClassAlphabet& classes);

// Trains on every token position (target: the class of that token, @bg for
// ordinary symbols) plus a sentence-final @bg event. The prior is taken from
// prior_corpus, normally the CFG portion of the training data.
DeciderModel TrainDecider(const std::vector<std::vector<int>>& tagged,
                          const std::vector<std::vector<int>>& prior_corpus,
                          const Vocabulary& vocab, const ClassAlphabet& classes,
                          const DeciderOptions& options);

}  // namespace nfclm

#endif  // NFCLM_DECIDER_H_
