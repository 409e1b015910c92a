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

#ifndef NFCLM_NFCLM_H_
#define NFCLM_NFCLM_H_

#include <cstdint>
#include <compare>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nfclm/class_fst.h"
#include "nfclm/decider.h"
#include "nfclm/seq_model.h"
#include "nfclm/vocab.h"

namespace nfclm {

// The factored model: background LM, one automaton per non-background class,
// and the decider mixing them. Immutable once constructed apart from alpha.
class NfclmModel {
 public:
  // fsts are matched to classes by label. Throws kMissingComponent when a
  // non-background class lacks an automaton and kInvariantViolation when the
  // components disagree on alphabets.
  NfclmModel(Vocabulary vocab, ClassAlphabet classes,
             std::shared_ptr<const ConditionalSymbolModel> background,
             std::vector<ClassFst> fsts, DeciderModel decider);

  const Vocabulary& vocab() const { return vocab_; }
  const ClassAlphabet& classes() const { return classes_; }
  const ConditionalSymbolModel& background() const { return *background_; }
  const std::shared_ptr<const ConditionalSymbolModel>& shared_background() const {
    return background_;
  }
  const DeciderModel& decider() const { return decider_; }
  void set_alpha(double alpha) { decider_.set_alpha(alpha); }

  // Throws kInvalidArgument for @bg, which has no automaton.
  const ClassFst& fst(int class_id) const;
  int num_outcomes() const { return vocab_.num_outcomes(); }
  int ClassToken(int class_id) const { return vocab_.class_token_base() + class_id; }

 private:
  Vocabulary vocab_;
  ClassAlphabet classes_;
  std::shared_ptr<const ConditionalSymbolModel> background_;
  std::vector<ClassFst> fsts_;  // indexed by class id; the @bg slot is empty
  DeciderModel decider_;
};

struct BeamOptions {
  int max_hypotheses = 100;
  // Natural-log band below the best hypothesis.
  double delta = 30.0;
  // Normalize P(h^c | h^w) over the surviving hypotheses. When false the
  // denominator is the unpruned mass, so pruning can only lose probability.
  bool renormalize = true;
};

// Where a hypothesis sits: in the background, or inside class_id at an
// automaton state after consuming at least one class symbol.
struct ClassPosition {
  int class_id = 0;
  int state = -1;

  auto operator<=>(const ClassPosition&) const = default;
};

struct AlignmentHypothesis {
  // Symbols aligned to @bg verbatim, each class span collapsed to its token.
  std::vector<int> decider_history;
  ClassPosition position;
  // log P(h^c, h^w).
  double log_weight = 0.0;
};

struct AlignmentBeam {
  std::vector<int> history;  // h^w
  std::vector<AlignmentHypothesis> hypotheses;
  BeamOptions options;
  // Log of the summed joint weight of all successors generated when this beam
  // was created, before pruning.
  double log_mass = 0.0;

  static AlignmentBeam Initial(const NfclmModel& model, const BeamOptions& options);
};

// Distribution over C_eps for the next symbol: epsilon = 1 - exit, and
// classes[c] = exit * P_D'(c | decider history).
struct EmissionDistribution {
  double epsilon = 0.0;
  std::vector<double> classes;
};

EmissionDistribution ClassEmission(const NfclmModel& model,
                                   const AlignmentHypothesis& hypothesis);

// P(w | c, h^c, h^w) for a stored hypothesis; history is h^w. Continuing a
// class span (c == kEpsilon) conditions the arc on not exiting, i.e. the arc
// probability divided by (1 - exit), so that each branch sums to one.
double ClassComponentProb(const NfclmModel& model, int symbol, int emitted_class,
                          const AlignmentHypothesis& hypothesis,
                          std::span<const int> history);

struct ExtendResult {
  AlignmentBeam beam;
  // log P(symbol | h^w); kLogZero when dead.
  double log_prob = 0.0;
  // No surviving hypothesis can generate the symbol.
  bool dead = false;
};

// One beam step: expand every hypothesis over C_eps, merge successors that
// share (decider history, position) by log-sum-exp, then prune to N and delta.
ExtendResult Extend(const NfclmModel& model, const AlignmentBeam& beam, int symbol);

// Next-symbol distribution over V plus EOS implied by a beam.
std::vector<double> NextDistribution(const NfclmModel& model, const AlignmentBeam& beam);

enum class ScoreMode { kBeam, kExact };

struct SequenceScore {
  double log_prob = 0.0;
  bool dead = false;
  // Index of the first impossible symbol (symbols.size() for EOS).
  size_t dead_position = 0;
};

// Sum of log P(w_k | w_<k) including the final EOS factor.
SequenceScore SequenceLogProb(const NfclmModel& model, std::span<const int> symbols,
                              ScoreMode mode, const BeamOptions& options = {});

// Ancestral sample; stops at EOS or after max_length symbols.
std::vector<int> Sample(const NfclmModel& model, int max_length, uint64_t seed);

// "_play,@song" style rendering of a decider history.
std::string FormatDeciderHistory(const NfclmModel& model, std::span<const int> history);

}  // namespace nfclm

#endif  // NFCLM_NFCLM_H_
