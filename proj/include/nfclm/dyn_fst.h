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

#ifndef NFCLM_DYN_FST_H_
#define NFCLM_DYN_FST_H_

#include <cstdint>
#include <list>
#include <map>
#include <optional>
#include <iosfwd>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nfclm/nfclm.h"
#include "nfclm/seq_model.h"

namespace nfclm {

// NFCLM as an infinite deterministic automaton expanded on demand.
//
// A state is a token history h^w; its payload is the alignment beam for that
// history. Arc weights are -log P(w | h^w) and final weights -log P(EOS | h^w)
// in natural log. Beams are cached with LRU eviction; an evicted state keeps
// its id and is rebuilt by replaying from its nearest resident ancestor, which
// reproduces the beam exactly because extension is deterministic.
//
// A session is single-writer. Distinct sessions may share one model.
class DynamicFst {
 public:
  using StateId = int64_t;

  struct Arc {
    StateId next;
    double weight;
  };

  struct Stats {
    uint64_t expansions = 0;
    uint64_t replays = 0;
    uint64_t replayed_steps = 0;
    uint64_t evictions = 0;
  };

  // capacity bounds the number of resident beams, start state included; 0
  // means unbounded and values below 2 act as 2.
  DynamicFst(const NfclmModel& model, BeamOptions options, size_t capacity = 0);

  StateId Start() const { return 0; }
  // Absent when the symbol is impossible under every alignment in the beam.
  std::optional<Arc> Transition(StateId state, int symbol);
  // Absent when EOS is impossible (mid-class at a non-final state).
  std::optional<double> FinalWeight(StateId state);

  const std::vector<int>& History(StateId state) const;
  // Rebuilds the beam if it was evicted.
  const AlignmentBeam& Beam(StateId state);

  size_t num_states() const { return records_.size(); }
  size_t num_resident() const { return lru_.size() + 1; }
  size_t capacity() const { return capacity_; }
  // Drops least-recently-used beams down to capacity and returns the running
  // statistics.
  Stats EvictAndReplay();
  // Evicts one specific state (never the start state). Used to exercise
  // replay from arbitrary points.
  void Evict(StateId state);
  const Stats& stats() const { return stats_; }

  // One line per state in id order ("STATE id history" followed by
  // "  HYP decider-history position log-weight" lines), then one
  // "ARC src symbol weight dst" line per expanded arc.
  void Dump(std::ostream& out);

 private:
  struct Record {
    std::vector<int> history;
    std::optional<AlignmentBeam> beam;
    std::optional<std::optional<double>> final_weight;
    std::list<StateId>::iterator lru_position;
  };

  StateId Intern(const std::vector<int>& history);
  AlignmentBeam& Materialize(StateId state);
  void Touch(StateId state);
  void Store(StateId state, AlignmentBeam beam);

  const NfclmModel& model_;
  BeamOptions options_;
  size_t capacity_;
  std::vector<Record> records_;
  std::unordered_map<std::vector<int>, StateId, TokenSequenceHash> ids_;
  // Most recently used at the front; excludes the start state.
  std::list<StateId> lru_;
  // Expanded arcs, (src, symbol) -> arc or nullopt for dead symbols.
  std::map<std::pair<StateId, int>, std::optional<Arc>> arcs_;
  Stats stats_;
};

}  // namespace nfclm

#endif  // NFCLM_DYN_FST_H_
