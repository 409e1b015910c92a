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

#include "nfclm/exact.h"

#include <algorithm>
#include <cmath>
#include <optional>

#include "nfclm/error.h"
#include "nfclm/log_math.h"

namespace nfclm {

namespace {

void CheckLengths(std::span<const int> symbols, std::span<const int> alignment) {
  if (symbols.size() != alignment.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "history has " + std::to_string(symbols.size()) +
                    " symbols but alignment has " + std::to_string(alignment.size()) +
                    " labels");
  }
}

// Automaton state reached by reading `prefix` from the start of class_id.
std::optional<int> Walk(const NfclmModel& model, int class_id, std::span<const int> prefix) {
  const ClassFst& fst = model.fst(class_id);
  int state = ClassFst::kStart;
  for (int w : prefix) {
    auto next = fst.Step(state, w);
    if (!next) return std::nullopt;
    state = *next;
  }
  return state;
}

// Exit probability of the class span the alignment currently sits in; one in
// the background and before anything was emitted.
double CurrentExit(const NfclmModel& model, std::span<const int> symbols,
                   std::span<const int> alignment) {
  int current = LastClass(alignment, kEpsilon);
  if (current == kEpsilon || model.classes().IsBackground(current)) return 1.0;
  auto state = Walk(model, current, ClassPrefix(symbols, alignment, current));
  if (!state) return 0.0;
  return model.fst(current).ExitProb(*state);
}

}  // namespace

int LastClass(std::span<const int> alignment, int candidate) {
  if (candidate != kEpsilon) return candidate;
  for (auto it = alignment.rbegin(); it != alignment.rend(); ++it) {
    if (*it != kEpsilon) return *it;
  }
  return kEpsilon;
}

std::vector<int> ClassPrefix(std::span<const int> symbols, std::span<const int> alignment,
                             int class_id) {
  CheckLengths(symbols, alignment);
  size_t i = alignment.size();
  while (i > 0 && alignment[i - 1] == kEpsilon) --i;
  if (i == 0 || alignment[i - 1] != class_id) return {};
  return std::vector<int>(symbols.begin() + static_cast<std::ptrdiff_t>(i - 1), symbols.end());
}

std::vector<int> DeciderHistory(const NfclmModel& model, std::span<const int> symbols,
                                std::span<const int> alignment) {
  CheckLengths(symbols, alignment);
  std::vector<int> out;
  for (size_t i = 0; i < alignment.size(); ++i) {
    int label = alignment[i];
    if (label == kEpsilon) continue;
    if (model.classes().IsBackground(label)) {
      out.push_back(symbols[i]);
    } else {
      out.push_back(model.ClassToken(label));
    }
  }
  return out;
}

double ClassEmissionForAlignment(const NfclmModel& model, std::span<const int> symbols,
                                 std::span<const int> alignment, int emitted_class) {
  CheckLengths(symbols, alignment);
  const double exit = CurrentExit(model, symbols, alignment);
  if (emitted_class == kEpsilon) return 1.0 - exit;
  if (exit == 0.0) return 0.0;
  std::vector<double> decider =
      model.decider().Distribution(DeciderHistory(model, symbols, alignment));
  return exit * decider.at(emitted_class);
}

double ClassComponentProbForAlignment(const NfclmModel& model, int symbol,
                                      int emitted_class, std::span<const int> symbols,
                                      std::span<const int> alignment) {
  CheckLengths(symbols, alignment);
  const int current = LastClass(alignment, emitted_class);
  if (current == kEpsilon) return 0.0;
  if (model.classes().IsBackground(current)) {
    return model.background().Prob(symbol, symbols);
  }
  const ClassFst& fst = model.fst(current);
  if (emitted_class != kEpsilon) {
    // A fresh entry reads from the start state, even right after another
    // span of the same class.
    return model.vocab().IsSymbol(symbol) ? fst.ArcProb(ClassFst::kStart, symbol) : 0.0;
  }
  auto state = Walk(model, current, ClassPrefix(symbols, alignment, current));
  if (!state) return 0.0;
  const double stay = 1.0 - fst.ExitProb(*state);
  if (stay <= 0.0 || !model.vocab().IsSymbol(symbol)) return 0.0;
  return fst.ArcProb(*state, symbol) / stay;
}

std::vector<ScoredAlignment> EnumerateAlignments(const NfclmModel& model,
                                                 std::span<const int> symbols) {
  if (symbols.size() > kMaxExactHistory) {
    throw Error(ErrorKind::kHistoryTooLong,
                "exhaustive enumeration supports at most " +
                    std::to_string(kMaxExactHistory) + " symbols, got " +
                    std::to_string(symbols.size()));
  }
  std::vector<ScoredAlignment> out;
  std::vector<int> labels;
  std::vector<int> candidates{kEpsilon};
  for (int c = 0; c < model.classes().size(); ++c) candidates.push_back(c);

  // Depth-first over C_eps^n; a prefix with a zero factor cannot complete to
  // a nonzero alignment, so it is not extended.
  auto recurse = [&](auto&& self, size_t k, double log_joint) -> void {
    if (k == symbols.size()) {
      out.push_back({labels, log_joint});
      return;
    }
    auto h_w = symbols.first(k);
    for (int c : candidates) {
      double emission = ClassEmissionForAlignment(model, h_w, labels, c);
      if (emission <= 0.0) continue;
      double component = ClassComponentProbForAlignment(model, symbols[k], c, h_w, labels);
      if (component <= 0.0) continue;
      labels.push_back(c);
      self(self, k + 1, log_joint + std::log(emission) + std::log(component));
      labels.pop_back();
    }
  };
  recurse(recurse, 0, 0.0);
  return out;
}

std::vector<double> ExactNextDistribution(const NfclmModel& model,
                                          std::span<const int> symbols) {
  std::vector<ScoredAlignment> alignments = EnumerateAlignments(model, symbols);
  std::vector<double> out(model.num_outcomes(), 0.0);
  if (alignments.empty()) return out;
  std::vector<double> log_joints;
  for (const auto& a : alignments) log_joints.push_back(a.log_joint);
  const double log_total = LogSumExp(log_joints);

  std::vector<int> candidates{kEpsilon};
  for (int c = 0; c < model.classes().size(); ++c) candidates.push_back(c);
  for (const auto& a : alignments) {
    const double posterior = std::exp(a.log_joint - log_total);
    for (int c : candidates) {
      double emission = ClassEmissionForAlignment(model, symbols, a.labels, c);
      if (emission <= 0.0) continue;
      for (int w = 0; w < model.num_outcomes(); ++w) {
        out[w] += posterior * emission *
                  ClassComponentProbForAlignment(model, w, c, symbols, a.labels);
      }
    }
  }
  return out;
}

}  // namespace nfclm
