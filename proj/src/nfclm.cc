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

#include "nfclm/nfclm.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "nfclm/error.h"
#include "nfclm/exact.h"
#include "nfclm/log_math.h"
#include "nfclm/random.h"

namespace nfclm {

NfclmModel::NfclmModel(Vocabulary vocab, ClassAlphabet classes,
                       std::shared_ptr<const ConditionalSymbolModel> background,
                       std::vector<ClassFst> fsts, DeciderModel decider)
    : vocab_(std::move(vocab)),
      classes_(std::move(classes)),
      background_(std::move(background)),
      decider_(std::move(decider)) {
  classes_.CheckDisjoint(vocab_);
  if (!background_) throw Error(ErrorKind::kMissingComponent, "background model");
  if (background_->num_outcomes() != vocab_.num_outcomes()) {
    throw Error(ErrorKind::kInvariantViolation,
                "background model predicts " + std::to_string(background_->num_outcomes()) +
                    " outcomes, vocabulary has " + std::to_string(vocab_.num_outcomes()));
  }
  if (decider_.num_classes() != classes_.size()) {
    throw Error(ErrorKind::kInvariantViolation, "decider class count mismatch");
  }
  if (decider_.ngram().num_history_tokens() != vocab_.class_token_base() + classes_.size()) {
    throw Error(ErrorKind::kInvariantViolation, "decider history alphabet mismatch");
  }
  fsts_.resize(classes_.size());
  std::vector<bool> seen(classes_.size(), false);
  for (ClassFst& fst : fsts) {
    auto id = classes_.Find(fst.label());
    if (!id || classes_.IsBackground(*id)) {
      throw Error(ErrorKind::kInvariantViolation,
                  "automaton for unknown class '" + fst.label() + "'");
    }
    if (seen[*id]) {
      throw Error(ErrorKind::kInvariantViolation,
                  "two automata for class '" + fst.label() + "'");
    }
    for (int s = 0; s < fst.num_states(); ++s) {
      for (const FstArc& a : fst.Arcs(s)) {
        if (!vocab_.IsSymbol(a.symbol)) {
          throw Error(ErrorKind::kInvariantViolation,
                      "automaton " + fst.label() + " uses symbol id " +
                          std::to_string(a.symbol) + " outside the vocabulary");
        }
      }
    }
    seen[*id] = true;
    fsts_[*id] = std::move(fst);
  }
  for (int c = 0; c < classes_.size(); ++c) {
    if (!classes_.IsBackground(c) && !seen[c]) {
      throw Error(ErrorKind::kMissingComponent, "automaton for class " + classes_.Label(c));
    }
  }
}

const ClassFst& NfclmModel::fst(int class_id) const {
  if (class_id < 0 || class_id >= classes_.size() || classes_.IsBackground(class_id)) {
    throw Error(ErrorKind::kInvalidArgument,
                "class id " + std::to_string(class_id) + " has no automaton");
  }
  return fsts_[class_id];
}

AlignmentBeam AlignmentBeam::Initial(const NfclmModel& model, const BeamOptions& options) {
  if (options.max_hypotheses < 1 || !(options.delta >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "beam needs N >= 1 and delta >= 0");
  }
  AlignmentBeam beam;
  beam.options = options;
  AlignmentHypothesis start;
  start.position = {model.classes().background(), -1};
  beam.hypotheses.push_back(std::move(start));
  return beam;
}

EmissionDistribution ClassEmission(const NfclmModel& model,
                                   const AlignmentHypothesis& hypothesis) {
  const ClassPosition& pos = hypothesis.position;
  double exit = 1.0;
  if (!model.classes().IsBackground(pos.class_id)) {
    exit = model.fst(pos.class_id).ExitProb(pos.state);
  }
  EmissionDistribution out;
  out.epsilon = 1.0 - exit;
  out.classes.assign(model.classes().size(), 0.0);
  if (exit > 0.0) {
    std::vector<double> decider = model.decider().Distribution(hypothesis.decider_history);
    for (int c = 0; c < model.classes().size(); ++c) out.classes[c] = exit * decider[c];
  }
  return out;
}

double ClassComponentProb(const NfclmModel& model, int symbol, int emitted_class,
                          const AlignmentHypothesis& hypothesis,
                          std::span<const int> history) {
  const ClassAlphabet& classes = model.classes();
  if (emitted_class == kEpsilon) {
    const ClassPosition& pos = hypothesis.position;
    // Continuation from the background (or from nothing) has no class to
    // continue.
    if (classes.IsBackground(pos.class_id)) return 0.0;
    const ClassFst& fst = model.fst(pos.class_id);
    double stay = 1.0 - fst.ExitProb(pos.state);
    if (stay <= 0.0) return 0.0;
    return fst.ArcProb(pos.state, symbol) / stay;
  }
  if (classes.IsBackground(emitted_class)) {
    return model.background().Prob(symbol, history);
  }
  const ClassFst& fst = model.fst(emitted_class);
  if (!model.vocab().IsSymbol(symbol)) return 0.0;
  return fst.ArcProb(ClassFst::kStart, symbol);
}

namespace {

// Successor of a hypothesis after emitting class `emitted` and symbol `w`.
// The caller guarantees the transition has nonzero probability.
AlignmentHypothesis Advance(const NfclmModel& model, const AlignmentHypothesis& from,
                            int emitted, int w, double log_weight) {
  AlignmentHypothesis next;
  next.log_weight = log_weight;
  if (emitted == kEpsilon) {
    next.decider_history = from.decider_history;
    const ClassFst& fst = model.fst(from.position.class_id);
    next.position = {from.position.class_id, *fst.Step(from.position.state, w)};
  } else if (model.classes().IsBackground(emitted)) {
    next.decider_history = from.decider_history;
    next.decider_history.push_back(w);
    next.position = {emitted, -1};
  } else {
    next.decider_history = from.decider_history;
    next.decider_history.push_back(model.ClassToken(emitted));
    next.position = {emitted, *model.fst(emitted).Step(ClassFst::kStart, w)};
  }
  return next;
}

std::vector<int> MergeKey(const AlignmentHypothesis& h) {
  std::vector<int> key = h.decider_history;
  key.push_back(h.position.class_id);
  key.push_back(h.position.state);
  return key;
}

// Beam order: higher weight, then shorter and lexicographically smaller
// decider history, then position.
bool BeamOrder(const AlignmentHypothesis& a, const AlignmentHypothesis& b) {
  if (a.log_weight != b.log_weight) return a.log_weight > b.log_weight;
  if (a.decider_history.size() != b.decider_history.size()) {
    return a.decider_history.size() < b.decider_history.size();
  }
  if (a.decider_history != b.decider_history) return a.decider_history < b.decider_history;
  return a.position < b.position;
}

double BeamLogNormalizer(const AlignmentBeam& beam) {
  if (!beam.options.renormalize) return beam.log_mass;
  std::vector<double> weights;
  weights.reserve(beam.hypotheses.size());
  for (const auto& h : beam.hypotheses) weights.push_back(h.log_weight);
  return LogSumExp(weights);
}

}  // namespace

ExtendResult Extend(const NfclmModel& model, const AlignmentBeam& beam, int symbol) {
  if (beam.hypotheses.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "cannot extend an empty beam");
  }
  if (symbol < 0 || symbol >= model.num_outcomes()) {
    throw Error(ErrorKind::kUnknownSymbol, "symbol id " + std::to_string(symbol));
  }
  const int num_classes = model.classes().size();
  const int background = model.classes().background();
  // P_@bg(w | h^w) is shared by every hypothesis of the beam.
  double background_prob = -1.0;

  std::vector<AlignmentHypothesis> successors;
  std::unordered_map<std::vector<int>, size_t, TokenSequenceHash> index;
  auto add = [&](const AlignmentHypothesis& parent, int emitted, double prob) {
    AlignmentHypothesis next =
        Advance(model, parent, emitted, symbol, parent.log_weight + std::log(prob));
    auto [it, inserted] = index.emplace(MergeKey(next), successors.size());
    if (inserted) {
      successors.push_back(std::move(next));
    } else {
      double& w = successors[it->second].log_weight;
      w = LogAdd(w, next.log_weight);
    }
  };

  for (const AlignmentHypothesis& hyp : beam.hypotheses) {
    EmissionDistribution emission = ClassEmission(model, hyp);
    if (emission.epsilon > 0.0) {
      double comp = ClassComponentProb(model, symbol, kEpsilon, hyp, beam.history);
      if (comp > 0.0) add(hyp, kEpsilon, emission.epsilon * comp);
    }
    for (int c = 0; c < num_classes; ++c) {
      if (emission.classes[c] <= 0.0) continue;
      double comp;
      if (c == background) {
        if (background_prob < 0.0) {
          background_prob = model.background().Prob(symbol, beam.history);
        }
        comp = background_prob;
      } else {
        comp = ClassComponentProb(model, symbol, c, hyp, beam.history);
      }
      if (comp > 0.0) add(hyp, c, emission.classes[c] * comp);
    }
  }

  ExtendResult result;
  result.beam.options = beam.options;
  result.beam.history = beam.history;
  result.beam.history.push_back(symbol);
  if (successors.empty()) {
    result.dead = true;
    result.log_prob = kLogZero;
    result.beam.log_mass = kLogZero;
    return result;
  }

  std::vector<double> weights;
  weights.reserve(successors.size());
  for (const auto& h : successors) weights.push_back(h.log_weight);
  const double mass = LogSumExp(weights);
  result.log_prob = mass - BeamLogNormalizer(beam);
  result.beam.log_mass = mass;

  std::sort(successors.begin(), successors.end(), BeamOrder);
  const size_t keep_max = static_cast<size_t>(beam.options.max_hypotheses);
  if (successors.size() > keep_max) successors.resize(keep_max);
  const double best = successors.front().log_weight;
  while (best - successors.back().log_weight > beam.options.delta) successors.pop_back();
  result.beam.hypotheses = std::move(successors);
  return result;
}

std::vector<double> NextDistribution(const NfclmModel& model, const AlignmentBeam& beam) {
  std::vector<double> out(model.num_outcomes(), 0.0);
  const double norm = BeamLogNormalizer(beam);
  const int background = model.classes().background();
  std::vector<double> background_dist;
  for (const AlignmentHypothesis& hyp : beam.hypotheses) {
    const double posterior = std::exp(hyp.log_weight - norm);
    EmissionDistribution emission = ClassEmission(model, hyp);
    if (emission.epsilon > 0.0) {
      const ClassFst& fst = model.fst(hyp.position.class_id);
      // epsilon = 1 - exit cancels the conditioning on staying in the class.
      const double scale = posterior;
      for (const FstArc& a : fst.Arcs(hyp.position.state)) out[a.symbol] += scale * a.prob;
    }
    for (int c = 0; c < model.classes().size(); ++c) {
      if (emission.classes[c] <= 0.0) continue;
      const double scale = posterior * emission.classes[c];
      if (c == background) {
        if (background_dist.empty()) {
          background_dist = model.background().Distribution(beam.history);
        }
        for (size_t w = 0; w < out.size(); ++w) out[w] += scale * background_dist[w];
      } else {
        for (const FstArc& a : model.fst(c).Arcs(ClassFst::kStart)) {
          out[a.symbol] += scale * a.prob;
        }
      }
    }
  }
  return out;
}

SequenceScore SequenceLogProb(const NfclmModel& model, std::span<const int> symbols,
                              ScoreMode mode, const BeamOptions& options) {
  SequenceScore score;
  for (int s : symbols) {
    if (!model.vocab().IsSymbol(s)) {
      throw Error(ErrorKind::kUnknownSymbol, "symbol id " + std::to_string(s));
    }
  }
  if (mode == ScoreMode::kExact) {
    if (symbols.size() > kMaxExactHistory) {
      throw Error(ErrorKind::kHistoryTooLong,
                  "exact scoring supports at most " + std::to_string(kMaxExactHistory) +
                      " symbols");
    }
    for (size_t k = 0; k <= symbols.size(); ++k) {
      std::vector<double> dist = ExactNextDistribution(model, symbols.first(k));
      int w = k < symbols.size() ? symbols[k] : model.vocab().eos();
      if (dist[w] <= 0.0) {
        score.dead = true;
        score.dead_position = k;
        score.log_prob = kLogZero;
        return score;
      }
      score.log_prob += std::log(dist[w]);
    }
    return score;
  }
  AlignmentBeam beam = AlignmentBeam::Initial(model, options);
  for (size_t k = 0; k <= symbols.size(); ++k) {
    int w = k < symbols.size() ? symbols[k] : model.vocab().eos();
    ExtendResult next = Extend(model, beam, w);
    if (next.dead) {
      score.dead = true;
      score.dead_position = k;
      score.log_prob = kLogZero;
      return score;
    }
    score.log_prob += next.log_prob;
    beam = std::move(next.beam);
  }
  return score;
}

std::vector<int> Sample(const NfclmModel& model, int max_length, uint64_t seed) {
  if (max_length < 1) throw Error(ErrorKind::kInvalidArgument, "max length must be >= 1");
  Rng rng(seed);
  const int background = model.classes().background();
  const int eos = model.vocab().eos();
  std::vector<int> symbols;
  AlignmentHypothesis hyp;
  hyp.position = {background, -1};
  std::vector<double> emission_weights(model.classes().size() + 1);
  std::vector<double> component(model.num_outcomes());
  while (static_cast<int>(symbols.size()) < max_length) {
    EmissionDistribution emission = ClassEmission(model, hyp);
    emission_weights[0] = emission.epsilon;
    std::copy(emission.classes.begin(), emission.classes.end(), emission_weights.begin() + 1);
    const int emitted = static_cast<int>(rng.Categorical(emission_weights)) - 1;

    std::fill(component.begin(), component.end(), 0.0);
    if (emitted == background) {
      component = model.background().Distribution(symbols);
    } else {
      const ClassFst& fst = model.fst(emitted == kEpsilon ? hyp.position.class_id : emitted);
      const int state = emitted == kEpsilon ? hyp.position.state : ClassFst::kStart;
      for (const FstArc& a : fst.Arcs(state)) component[a.symbol] = a.prob;
    }
    const int w = static_cast<int>(rng.Categorical(component));
    if (w == eos) break;
    hyp = Advance(model, hyp, emitted, w, 0.0);
    symbols.push_back(w);
  }
  return symbols;
}

std::string FormatDeciderHistory(const NfclmModel& model, std::span<const int> history) {
  std::string out;
  for (size_t i = 0; i < history.size(); ++i) {
    if (i) out.push_back(',');
    int t = history[i];
    if (t >= model.vocab().class_token_base()) {
      out += model.classes().Label(t - model.vocab().class_token_base());
    } else {
      out += model.vocab().Symbol(t);
    }
  }
  return out;
}

}  // namespace nfclm
