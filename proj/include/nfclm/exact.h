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

#ifndef NFCLM_EXACT_H_
#define NFCLM_EXACT_H_

#include <span>
#include <vector>

#include "nfclm/nfclm.h"

namespace nfclm {

// Alignment-level view of the model. Everything here recomputes from the raw
// (h^w, h^c) pair, walking automata from their start states, and serves as the
// reference against which the incremental beam is checked.

inline constexpr size_t kMaxExactHistory = 12;

// Last non-epsilon label of {alignment, candidate}, or kEpsilon.
int LastClass(std::span<const int> alignment, int candidate);

// Suffix of h^w generated by class_id and its epsilon continuations; empty
// when the alignment is not currently inside class_id.
std::vector<int> ClassPrefix(std::span<const int> symbols, std::span<const int> alignment,
                             int class_id);

// h^c with epsilons removed and @bg replaced by the aligned symbol.
std::vector<int> DeciderHistory(const NfclmModel& model, std::span<const int> symbols,
                                std::span<const int> alignment);

// P(c | h^c, h^w).
double ClassEmissionForAlignment(const NfclmModel& model, std::span<const int> symbols,
                                 std::span<const int> alignment, int emitted_class);

// P(w | c, h^c, h^w).
double ClassComponentProbForAlignment(const NfclmModel& model, int symbol,
                                      int emitted_class, std::span<const int> symbols,
                                      std::span<const int> alignment);

struct ScoredAlignment {
  std::vector<int> labels;
  double log_joint = 0.0;  // log P(h^c, h^w)
};

// Every alignment of h^w with nonzero joint probability, in lexicographic
// label order (epsilon first). Throws kHistoryTooLong beyond kMaxExactHistory.
std::vector<ScoredAlignment> EnumerateAlignments(const NfclmModel& model,
                                                 std::span<const int> symbols);

// Exact next-symbol distribution over V plus EOS by brute-force enumeration.
std::vector<double> ExactNextDistribution(const NfclmModel& model,
                                          std::span<const int> symbols);

}  // namespace nfclm

#endif  // NFCLM_EXACT_H_
