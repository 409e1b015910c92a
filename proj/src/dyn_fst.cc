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

#include "nfclm/dyn_fst.h"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "nfclm/error.h"

namespace nfclm {

DynamicFst::DynamicFst(const NfclmModel& model, BeamOptions options, size_t capacity)
    : model_(model), options_(options), capacity_(capacity) {
  Record start;
  start.beam = AlignmentBeam::Initial(model_, options_);
  start.lru_position = lru_.end();
  records_.push_back(std::move(start));
  ids_.emplace(std::vector<int>{}, 0);
}

const std::vector<int>& DynamicFst::History(StateId state) const {
  if (state < 0 || state >= static_cast<StateId>(records_.size())) {
    throw Error(ErrorKind::kUnknownState, "dynamic state " + std::to_string(state));
  }
  return records_[state].history;
}

DynamicFst::StateId DynamicFst::Intern(const std::vector<int>& history) {
  auto [it, inserted] = ids_.emplace(history, static_cast<StateId>(records_.size()));
  if (inserted) {
    Record r;
    r.history = history;
    r.lru_position = lru_.end();
    records_.push_back(std::move(r));
  }
  return it->second;
}

void DynamicFst::Touch(StateId state) {
  if (state == Start()) return;
  Record& r = records_[state];
  if (r.lru_position != lru_.end()) lru_.erase(r.lru_position);
  lru_.push_front(state);
  r.lru_position = lru_.begin();
}

void DynamicFst::Store(StateId state, AlignmentBeam beam) {
  records_[state].beam = std::move(beam);
  Touch(state);
  if (capacity_ > 0 && num_resident() > capacity_) EvictAndReplay();
}

void DynamicFst::Evict(StateId state) {
  History(state);
  if (state == Start()) return;
  Record& r = records_[state];
  if (!r.beam) return;
  r.beam.reset();
  lru_.erase(r.lru_position);
  r.lru_position = lru_.end();
  ++stats_.evictions;
}

DynamicFst::Stats DynamicFst::EvictAndReplay() {
  // The start state and the most recent state always stay resident.
  const size_t limit = capacity_ == 0 ? num_resident() : std::max<size_t>(capacity_, 2);
  while (num_resident() > limit && !lru_.empty()) Evict(lru_.back());
  return stats_;
}

AlignmentBeam& DynamicFst::Materialize(StateId state) {
  History(state);
  if (records_[state].beam) {
    Touch(state);
    return *records_[state].beam;
  }
  // Nearest resident ancestor; the start state is always resident.
  const std::vector<int> history = records_[state].history;
  size_t depth = history.size();
  const AlignmentBeam* base = nullptr;
  while (true) {
    --depth;
    std::vector<int> prefix(history.begin(), history.begin() + static_cast<std::ptrdiff_t>(depth));
    auto it = ids_.find(prefix);
    if (it != ids_.end() && records_[it->second].beam) {
      base = &*records_[it->second].beam;
      break;
    }
  }
  ++stats_.replays;
  AlignmentBeam beam = *base;
  for (size_t k = depth; k < history.size(); ++k) {
    ExtendResult next = Extend(model_, beam, history[k]);
    ++stats_.replayed_steps;
    if (next.dead) {
      throw Error(ErrorKind::kDeadHistory, "replay reached a dead history");
    }
    beam = std::move(next.beam);
  }
  // Storing may evict, but never the entry just touched.
  Store(state, std::move(beam));
  return *records_[state].beam;
}

std::optional<DynamicFst::Arc> DynamicFst::Transition(StateId state, int symbol) {
  if (!model_.vocab().IsSymbol(symbol)) {
    throw Error(ErrorKind::kUnknownSymbol, "symbol id " + std::to_string(symbol));
  }
  auto cached = arcs_.find({state, symbol});
  const bool known = cached != arcs_.end();
  if (known && (!cached->second || records_[cached->second->next].beam)) {
    Touch(state);
    if (cached->second) Touch(cached->second->next);
    return cached->second;
  }
  ExtendResult next = Extend(model_, Materialize(state), symbol);
  ++stats_.expansions;
  if (next.dead) {
    arcs_[{state, symbol}] = std::nullopt;
    return std::nullopt;
  }
  StateId dst = Intern(next.beam.history);
  Arc arc{dst, -next.log_prob};
  Store(dst, std::move(next.beam));
  arcs_[{state, symbol}] = arc;
  return arc;
}

std::optional<double> DynamicFst::FinalWeight(StateId state) {
  History(state);
  if (records_[state].final_weight) return *records_[state].final_weight;
  ExtendResult end = Extend(model_, Materialize(state), model_.vocab().eos());
  std::optional<double> weight;
  if (!end.dead) weight = -end.log_prob;
  records_[state].final_weight = weight;
  return weight;
}

const AlignmentBeam& DynamicFst::Beam(StateId state) { return Materialize(state); }

void DynamicFst::Dump(std::ostream& out) {
  auto flags = out.flags();
  auto precision = out.precision();
  out << std::setprecision(17);
  for (StateId s = 0; s < static_cast<StateId>(records_.size()); ++s) {
    const std::vector<int> history = records_[s].history;
    out << "STATE\t" << s << '\t'
        << (history.empty() ? std::string("<empty>")
                            : FormatDeciderHistory(model_, history))
        << '\n';
    const AlignmentBeam& beam = Materialize(s);
    for (const AlignmentHypothesis& h : beam.hypotheses) {
      out << "  HYP\t"
          << (h.decider_history.empty() ? std::string("<empty>")
                                        : FormatDeciderHistory(model_, h.decider_history))
          << '\t';
      if (model_.classes().IsBackground(h.position.class_id)) {
        out << "@bg";
      } else {
        out << "s(" << model_.classes().Label(h.position.class_id)
            << ")=" << h.position.state;
      }
      out << '\t' << h.log_weight << '\n';
    }
  }
  for (const auto& [key, arc] : arcs_) {
    if (!arc) continue;
    out << "ARC\t" << key.first << '\t' << model_.vocab().Symbol(key.second) << '\t'
        << arc->weight << '\t' << arc->next << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

}  // namespace nfclm
