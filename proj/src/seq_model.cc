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

#include "nfclm/seq_model.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "nfclm/binary_io.h"
#include "nfclm/error.h"
#include "nfclm/vocab.h"

namespace nfclm {

namespace {
constexpr std::string_view kNGramMagic = "NFNG";
constexpr std::string_view kUniformMagic = "NFUN";
constexpr uint32_t kVersion = 1;
}  // namespace

std::vector<double> ConditionalSymbolModel::Distribution(std::span<const int> history) const {
  std::vector<double> out(num_outcomes());
  for (int w = 0; w < num_outcomes(); ++w) out[w] = Prob(w, history);
  return out;
}

double ConditionalSymbolModel::LogProb(int outcome, std::span<const int> history) const {
  return std::log(Prob(outcome, history));
}

std::unique_ptr<ConditionalSymbolModel> DeserializeSymbolModel(std::string_view bytes) {
  if (bytes.substr(0, 4) == kNGramMagic) {
    return std::make_unique<BackoffNGram>(BackoffNGram::Deserialize(bytes));
  }
  if (bytes.substr(0, 4) == kUniformMagic) {
    return std::make_unique<UniformModel>(UniformModel::Deserialize(bytes));
  }
  throw Error(ErrorKind::kMalformedData, "unknown symbol-model magic at byte offset 0");
}

UniformModel::UniformModel(int num_outcomes) : num_outcomes_(num_outcomes) {
  if (num_outcomes < 1) throw Error(ErrorKind::kInvalidArgument, "uniform model needs outcomes");
}

double UniformModel::Prob(int outcome, std::span<const int>) const {
  if (outcome < 0 || outcome >= num_outcomes_) {
    throw Error(ErrorKind::kUnknownSymbol, "outcome " + std::to_string(outcome));
  }
  return 1.0 / num_outcomes_;
}

std::vector<double> UniformModel::Distribution(std::span<const int>) const {
  return std::vector<double>(num_outcomes_, 1.0 / num_outcomes_);
}

std::string UniformModel::Serialize() const {
  ByteWriter w;
  w.PutBytes(kUniformMagic);
  w.PutU32(kVersion);
  w.PutU32(static_cast<uint32_t>(num_outcomes_));
  return w.Release();
}

UniformModel UniformModel::Deserialize(std::string_view bytes) {
  ByteReader r(bytes);
  r.ExpectHeader(kUniformMagic, kVersion);
  uint32_t n = r.GetU32();
  r.ExpectEnd();
  if (n == 0 || n > (1u << 30)) r.Fail("bad outcome count");
  return UniformModel(static_cast<int>(n));
}

BackoffNGram::Counter::Counter(int order, int num_outcomes, int num_history_tokens,
                               int pad_token)
    : order_(order),
      num_outcomes_(num_outcomes),
      num_history_tokens_(num_history_tokens),
      pad_token_(pad_token),
      counts_(order > 0 ? order : 0) {
  if (order < 1) throw Error(ErrorKind::kInvalidArgument, "n-gram order must be >= 1");
  if (num_outcomes < 1) throw Error(ErrorKind::kInvalidArgument, "n-gram needs outcomes");
  if (pad_token < 0 || pad_token >= num_history_tokens) {
    throw Error(ErrorKind::kInvalidArgument, "pad token outside history alphabet");
  }
}

void BackoffNGram::Counter::Add(std::span<const int> history, int outcome) {
  if (outcome < 0 || outcome >= num_outcomes_) {
    throw Error(ErrorKind::kUnknownSymbol, "outcome " + std::to_string(outcome));
  }
  for (int t : history) {
    if (t < 0 || t >= num_history_tokens_) {
      throw Error(ErrorKind::kUnknownSymbol, "history token " + std::to_string(t));
    }
  }
  std::vector<int> ctx;
  for (int k = 0; k < order_; ++k) {
    ctx.clear();
    for (int i = k; i > 0; --i) {
      int pos = static_cast<int>(history.size()) - i;
      ctx.push_back(pos >= 0 ? history[pos] : pad_token_);
    }
    ++counts_[k][ctx][outcome];
  }
}

BackoffNGram BackoffNGram::Counter::Finish(double discount) && {
  if (!(discount > 0.0 && discount < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "discount must lie in (0,1)");
  }
  if (counts_[0].empty()) throw Error(ErrorKind::kEmptyInput, "no training events");
  BackoffNGram m;
  m.order_ = order_;
  m.discount_ = discount;
  m.num_outcomes_ = num_outcomes_;
  m.num_history_tokens_ = num_history_tokens_;
  m.pad_token_ = pad_token_;
  m.tables_.resize(order_);
  for (int k = 0; k < order_; ++k) {
    for (auto& [ctx, outcome_counts] : counts_[k]) {
      ContextStats stats;
      stats.counts.assign(outcome_counts.begin(), outcome_counts.end());
      std::sort(stats.counts.begin(), stats.counts.end());
      for (const auto& [o, c] : stats.counts) stats.total += c;
      m.tables_[k].emplace(ctx, std::move(stats));
    }
    counts_[k].clear();
  }
  return m;
}

void BackoffNGram::CheckHistory(std::span<const int> history) const {
  for (int t : history) {
    if (t < 0 || t >= num_history_tokens_) {
      throw Error(ErrorKind::kUnknownSymbol, "history token " + std::to_string(t));
    }
  }
}

std::vector<int> BackoffNGram::Context(std::span<const int> history, int length) const {
  std::vector<int> ctx;
  ctx.reserve(length);
  for (int i = length; i > 0; --i) {
    int pos = static_cast<int>(history.size()) - i;
    ctx.push_back(pos >= 0 ? history[pos] : pad_token_);
  }
  return ctx;
}

double BackoffNGram::Prob(int outcome, std::span<const int> history) const {
  if (outcome < 0 || outcome >= num_outcomes_) {
    throw Error(ErrorKind::kUnknownSymbol, "outcome " + std::to_string(outcome));
  }
  CheckHistory(history);
  double p = 1.0 / num_outcomes_;
  for (int k = 0; k < order_; ++k) {
    auto it = tables_[k].find(Context(history, k));
    if (it == tables_[k].end()) break;
    const ContextStats& stats = it->second;
    auto c = std::lower_bound(stats.counts.begin(), stats.counts.end(),
                              std::make_pair(outcome, uint64_t{0}));
    double count = (c != stats.counts.end() && c->first == outcome)
                       ? static_cast<double>(c->second)
                       : 0.0;
    double total = static_cast<double>(stats.total);
    double distinct = static_cast<double>(stats.counts.size());
    p = (std::max(count - discount_, 0.0) + discount_ * distinct * p) / total;
  }
  return p;
}

std::vector<double> BackoffNGram::Distribution(std::span<const int> history) const {
  CheckHistory(history);
  std::vector<double> p(num_outcomes_, 1.0 / num_outcomes_);
  for (int k = 0; k < order_; ++k) {
    auto it = tables_[k].find(Context(history, k));
    if (it == tables_[k].end()) break;
    const ContextStats& stats = it->second;
    double total = static_cast<double>(stats.total);
    double backoff = discount_ * static_cast<double>(stats.counts.size()) / total;
    for (double& v : p) v *= backoff;
    for (const auto& [o, c] : stats.counts) {
      p[o] += (static_cast<double>(c) - discount_) / total;
    }
  }
  return p;
}

std::string BackoffNGram::Serialize() const {
  ByteWriter w;
  w.PutBytes(kNGramMagic);
  w.PutU32(kVersion);
  w.PutU32(static_cast<uint32_t>(order_));
  w.PutF64(discount_);
  w.PutU32(static_cast<uint32_t>(num_outcomes_));
  w.PutU32(static_cast<uint32_t>(num_history_tokens_));
  w.PutU32(static_cast<uint32_t>(pad_token_));
  for (int k = 0; k < order_; ++k) {
    std::map<std::vector<int>, const ContextStats*> sorted;
    for (const auto& [ctx, stats] : tables_[k]) sorted.emplace(ctx, &stats);
    w.PutU64(sorted.size());
    for (const auto& [ctx, stats] : sorted) {
      for (int t : ctx) w.PutI32(t);
      w.PutU32(static_cast<uint32_t>(stats->counts.size()));
      for (const auto& [o, c] : stats->counts) {
        w.PutI32(o);
        w.PutU64(c);
      }
    }
  }
  return w.Release();
}

BackoffNGram BackoffNGram::Deserialize(std::string_view bytes) {
  ByteReader r(bytes);
  r.ExpectHeader(kNGramMagic, kVersion);
  BackoffNGram m;
  uint32_t order = r.GetU32();
  if (order < 1 || order > 64) r.Fail("bad n-gram order");
  m.order_ = static_cast<int>(order);
  m.discount_ = r.GetF64();
  if (!(m.discount_ > 0.0 && m.discount_ < 1.0)) r.Fail("bad discount");
  m.num_outcomes_ = static_cast<int>(r.GetU32());
  m.num_history_tokens_ = static_cast<int>(r.GetU32());
  m.pad_token_ = static_cast<int>(r.GetU32());
  if (m.num_outcomes_ < 1 || m.num_history_tokens_ < 1 || m.pad_token_ < 0 ||
      m.pad_token_ >= m.num_history_tokens_) {
    r.Fail("bad alphabet sizes");
  }
  m.tables_.resize(order);
  for (int k = 0; k < m.order_; ++k) {
    uint64_t n = r.GetU64();
    if (n > bytes.size()) r.Fail("bad context count");
    for (uint64_t i = 0; i < n; ++i) {
      std::vector<int> ctx(k);
      for (int& t : ctx) {
        t = r.GetI32();
        if (t < 0 || t >= m.num_history_tokens_) r.Fail("context token out of range");
      }
      ContextStats stats;
      uint32_t entries = r.GetU32();
      if (entries == 0 || entries > static_cast<uint32_t>(m.num_outcomes_)) {
        r.Fail("bad entry count");
      }
      stats.counts.resize(entries);
      for (uint32_t e = 0; e < entries; ++e) {
        auto& [o, c] = stats.counts[e];
        o = r.GetI32();
        c = r.GetU64();
        if (o < 0 || o >= m.num_outcomes_ || c == 0) r.Fail("bad count entry");
        if (e > 0 && stats.counts[e - 1].first >= o) r.Fail("unsorted entries");
        stats.total += c;
      }
      if (!m.tables_[k].emplace(std::move(ctx), std::move(stats)).second) {
        r.Fail("duplicate context");
      }
    }
  }
  r.ExpectEnd();
  if (m.tables_[0].empty()) r.Fail("missing unigram table");
  return m;
}

void BackoffNGram::WriteCounts(std::ostream& out) const {
  for (int k = 0; k < order_; ++k) {
    std::map<std::vector<int>, const ContextStats*> sorted;
    for (const auto& [ctx, stats] : tables_[k]) sorted.emplace(ctx, &stats);
    for (const auto& [ctx, stats] : sorted) {
      std::string ctx_text;
      for (size_t i = 0; i < ctx.size(); ++i) {
        if (i) ctx_text.push_back(' ');
        ctx_text += std::to_string(ctx[i]);
      }
      for (const auto& [o, c] : stats->counts) {
        out << k + 1 << '\t' << ctx_text << '\t' << o << '\t' << c << '\n';
      }
    }
  }
}

bool BackoffNGram::operator==(const BackoffNGram& other) const {
  if (order_ != other.order_ || discount_ != other.discount_ ||
      num_outcomes_ != other.num_outcomes_ ||
      num_history_tokens_ != other.num_history_tokens_ || pad_token_ != other.pad_token_) {
    return false;
  }
  for (int k = 0; k < order_; ++k) {
    if (tables_[k].size() != other.tables_[k].size()) return false;
    for (const auto& [ctx, stats] : tables_[k]) {
      auto it = other.tables_[k].find(ctx);
      if (it == other.tables_[k].end() || it->second.counts != stats.counts) return false;
    }
  }
  return true;
}

BackoffNGram TrainBackgroundNGram(const std::vector<std::vector<int>>& corpus,
                                  const Vocabulary& vocab, const NGramOptions& options) {
  if (corpus.empty()) throw Error(ErrorKind::kEmptyInput, "background corpus is empty");
  BackoffNGram::Counter counter(options.order, vocab.num_outcomes(), vocab.bos() + 1,
                                vocab.bos());
  for (const auto& sentence : corpus) {
    for (size_t i = 0; i < sentence.size(); ++i) {
      if (!vocab.IsSymbol(sentence[i])) {
        throw Error(ErrorKind::kUnknownSymbol,
                    "symbol id " + std::to_string(sentence[i]) + " in background corpus");
      }
      counter.Add(std::span<const int>(sentence).first(i), sentence[i]);
    }
    counter.Add(sentence, vocab.eos());
  }
  return std::move(counter).Finish(options.discount);
}

}  // namespace nfclm
