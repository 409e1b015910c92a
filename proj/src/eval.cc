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

#include "nfclm/eval.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <thread>
#include <unordered_map>

#include "nfclm/error.h"
#include "nfclm/text_io.h"

namespace nfclm {

SentenceScorer MakeNfclmScorer(const NfclmModel& model, ScoreMode mode,
                               const BeamOptions& options) {
  return [&model, mode, options](std::span<const int> symbols) {
    return SequenceLogProb(model, symbols, mode, options);
  };
}

SentenceScorer MakeBackgroundScorer(const ConditionalSymbolModel& model,
                                    const Vocabulary& vocab) {
  return [&model, &vocab](std::span<const int> symbols) {
    SequenceScore score;
    for (size_t k = 0; k <= symbols.size(); ++k) {
      int w = k < symbols.size() ? symbols[k] : vocab.eos();
      score.log_prob += model.LogProb(w, symbols.first(k));
    }
    return score;
  };
}

std::vector<SequenceScore> ScoreCorpus(const SentenceScorer& scorer,
                                       const std::vector<std::vector<int>>& corpus,
                                       int threads) {
  std::vector<SequenceScore> scores(corpus.size());
  const size_t workers =
      std::min<size_t>(std::max(threads, 1), std::max<size_t>(corpus.size(), 1));
  if (workers <= 1) {
    for (size_t i = 0; i < corpus.size(); ++i) scores[i] = scorer(corpus[i]);
    return scores;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (size_t i = t; i < corpus.size(); i += workers) scores[i] = scorer(corpus[i]);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return scores;
}

PerplexityResult ComputePerplexity(const SentenceScorer& scorer,
                                   const std::vector<std::vector<int>>& corpus,
                                   const PerplexityOptions& options) {
  if (corpus.empty()) throw Error(ErrorKind::kEmptyInput, "perplexity corpus is empty");
  std::vector<SequenceScore> scores = ScoreCorpus(scorer, corpus, options.threads);
  PerplexityResult result;
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (scores[i].dead) {
      result.dead_sentences.push_back(i);
      continue;
    }
    result.total_log_prob += scores[i].log_prob;
    result.num_tokens += corpus[i].size() + 1;
    ++result.num_sentences;
  }
  if (!result.dead_sentences.empty() && !options.skip_dead) {
    result.perplexity = std::numeric_limits<double>::infinity();
  } else if (result.num_tokens == 0) {
    throw Error(ErrorKind::kDeadHistory, "every sentence has a dead history");
  } else {
    result.perplexity =
        std::exp(-result.total_log_prob / static_cast<double>(result.num_tokens));
  }
  return result;
}

void ValidateFusionWeights(const FusionWeights& weights) {
  if (!(weights.lm >= 0.0) || !std::isfinite(weights.lm) || !(weights.ilm >= 0.0) ||
      !std::isfinite(weights.ilm)) {
    throw Error(ErrorKind::kInvalidArgument, "fusion weights must be finite and >= 0");
  }
}

namespace {

double ParseScore(std::string_view text, size_t line_no) {
  text = Trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::kMalformedData,
                "bad score '" + std::string(text) + "' on n-best line " +
                    std::to_string(line_no));
  }
  return v;
}

}  // namespace

std::vector<NBestEntry> ParseNBest(std::istream& in, const Vocabulary& vocab) {
  std::vector<NBestEntry> entries;
  std::unordered_map<std::string, size_t> next_rank;
  size_t line_no = 0;
  for (const std::string& line : ReadLines(in)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto fields = Split(line, '\t');
    if (fields.size() != 4) {
      throw Error(ErrorKind::kMalformedData,
                  "n-best line " + std::to_string(line_no) + " needs 4 tab-separated fields");
    }
    NBestEntry e;
    e.utterance_id = std::string(Trim(fields[0]));
    if (e.utterance_id.empty()) {
      throw Error(ErrorKind::kMalformedData, "empty utterance id on line " + std::to_string(line_no));
    }
    e.asr_score = ParseScore(fields[1], line_no);
    e.ilm_score = ParseScore(fields[2], line_no);
    e.hypothesis = std::string(Trim(fields[3]));
    try {
      e.symbols = vocab.ParseSymbols(e.hypothesis);
    } catch (const Error& err) {
      e.tokenizable = false;
      e.symbols.clear();
      e.error = err.what();
    }
    e.rank = next_rank[e.utterance_id]++;
    entries.push_back(std::move(e));
  }
  return entries;
}

std::map<std::string, std::string> ParseReferences(std::istream& in) {
  std::map<std::string, std::string> refs;
  size_t line_no = 0;
  for (const std::string& line : ReadLines(in)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorKind::kMalformedData, "reference line " + std::to_string(line_no));
    }
    std::string text;
    for (std::string_view tok : SplitWhitespace(std::string_view(line).substr(tab + 1))) {
      if (!text.empty()) text.push_back(' ');
      text += tok;
    }
    refs[std::string(Trim(std::string_view(line).substr(0, tab)))] = text;
  }
  return refs;
}

std::vector<RescoredEntry> ScoreNBest(const NfclmModel& model,
                                      const std::vector<NBestEntry>& entries,
                                      ScoreMode mode, const BeamOptions& options,
                                      int threads) {
  std::vector<std::vector<int>> sentences;
  std::vector<size_t> which;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].tokenizable) {
      sentences.push_back(entries[i].symbols);
      which.push_back(i);
    }
  }
  std::vector<SequenceScore> scores =
      ScoreCorpus(MakeNfclmScorer(model, mode, options), sentences, threads);
  std::vector<RescoredEntry> out(entries.size());
  for (size_t i = 0; i < entries.size(); ++i) {
    out[i].entry = entries[i];
    out[i].failed = !entries[i].tokenizable;
  }
  for (size_t j = 0; j < which.size(); ++j) {
    RescoredEntry& r = out[which[j]];
    r.lm_log_prob = scores[j].log_prob;
    if (scores[j].dead) {
      r.failed = true;
      r.entry.error = "dead history at position " + std::to_string(scores[j].dead_position);
    }
  }
  return out;
}

std::vector<RescoredEntry> RankNBest(std::vector<RescoredEntry> scored,
                                     const FusionWeights& weights) {
  ValidateFusionWeights(weights);
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<RescoredEntry>> groups;
  for (RescoredEntry& r : scored) {
    r.fused_score = r.failed ? -std::numeric_limits<double>::infinity()
                             : r.entry.asr_score + weights.lm * r.lm_log_prob -
                                   weights.ilm * r.entry.ilm_score;
    auto [it, inserted] = groups.try_emplace(r.entry.utterance_id);
    if (inserted) order.push_back(r.entry.utterance_id);
    it->second.push_back(std::move(r));
  }
  std::vector<RescoredEntry> out;
  out.reserve(scored.size());
  for (const std::string& id : order) {
    auto& group = groups[id];
    std::stable_sort(group.begin(), group.end(),
                     [](const RescoredEntry& a, const RescoredEntry& b) {
                       if (a.failed != b.failed) return !a.failed;
                       if (a.fused_score != b.fused_score) return a.fused_score > b.fused_score;
                       return a.entry.rank < b.entry.rank;
                     });
    for (auto& r : group) out.push_back(std::move(r));
  }
  return out;
}

std::vector<RescoredEntry> RescoreNBest(const NfclmModel& model,
                                        const std::vector<NBestEntry>& entries,
                                        const FusionWeights& weights, ScoreMode mode,
                                        const BeamOptions& options) {
  if (entries.empty()) throw Error(ErrorKind::kEmptyInput, "n-best list is empty");
  ValidateFusionWeights(weights);
  return RankNBest(ScoreNBest(model, entries, mode, options), weights);
}

}  // namespace nfclm
