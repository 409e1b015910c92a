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

#ifndef NFCLM_CLASS_FST_H_
#define NFCLM_CLASS_FST_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nfclm {

class Vocabulary;

struct Entity {
  std::vector<int> symbols;
  double count = 1.0;
};

// Entity list format: one entity per line, symbols space-separated, optional
// "\t<count>" suffix. Blank lines are skipped.
std::vector<Entity> ParseEntities(std::istream& in, const Vocabulary& vocab);
std::vector<Entity> LoadEntitiesFile(const std::filesystem::path& path,
                                     const Vocabulary& vocab);

struct FstArc {
  int symbol;
  double prob;
  int next;

  bool operator==(const FstArc&) const = default;
};

// Deterministic acyclic stochastic automaton over the entities of one class.
//
// The automaton is the entity trie with relative-frequency weights: an arc
// carries the share of its source prefix's weight that continues through it,
// and a state's exit probability is the share that ends there. Per state the
// arc probabilities plus the exit probability sum to one. State 0 is the
// start state; states are numbered in preorder with arcs sorted by symbol, so
// a given multiset of entities always produces the same automaton.
class ClassFst {
 public:
  static constexpr int kStart = 0;

  ClassFst() = default;

  // Throws kEmptyEntity on an empty list or an empty entity and
  // kInvalidArgument on a non-positive count. Duplicate entities have their
  // counts summed.
  static ClassFst Build(std::string label, std::vector<Entity> entities);

  const std::string& label() const { return label_; }
  int num_states() const { return static_cast<int>(states_.size()); }
  int num_arcs() const;
  uint64_t num_entities() const { return num_entities_; }
  double total_weight() const { return total_weight_; }

  std::optional<int> Step(int state, int symbol) const;
  // 0 when no arc matches.
  double ArcProb(int state, int symbol) const;
  double ExitProb(int state) const;
  std::span<const FstArc> Arcs(int state) const;

  // Binary form: "NFCF", u32 version, label, entity metadata, then per state
  // the exit probability and the arc list. Little-endian throughout.
  std::string Serialize() const;
  // Validates every invariant; malformed bytes report their offset.
  static ClassFst Deserialize(std::string_view bytes);

  // "src symbol prob dst" per arc, "src EXIT prob" per state with nonzero
  // exit. Probabilities print with 17 significant digits.
  void WriteText(std::ostream& out, const Vocabulary* vocab = nullptr) const;

  // Throws kInvariantViolation naming the first broken property.
  void Validate(double tolerance = 1e-9) const;

  bool operator==(const ClassFst&) const = default;

 private:
  struct State {
    double exit = 0.0;
    std::vector<FstArc> arcs;

    bool operator==(const State&) const = default;
  };

  const State& CheckedState(int state) const;

  std::string label_;
  std::vector<State> states_;
  uint64_t num_entities_ = 0;
  double total_weight_ = 0.0;
};

}  // namespace nfclm

#endif  // NFCLM_CLASS_FST_H_
