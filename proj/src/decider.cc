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

#include "nfclm/decider.h"

#include <cmath>

#include "nfclm/binary_io.h"
#include "nfclm/error.h"
#include "nfclm/text_io.h"
#include "nfclm/vocab.h"

namespace nfclm {

namespace {
constexpr std::string_view kMagic = "NFDC";
constexpr uint32_t kVersion = 1;

int ClassOf(int token, const Vocabulary& vocab, const ClassAlphabet& classes) {
  if (vocab.IsSymbol(token)) return classes.background();
  int c = token - vocab.class_token_base();
  if (c < 0 || c >= classes.size() || c == classes.background()) {
    throw Error(ErrorKind::kUnknownSymbol, "tagged token id " + std::to_string(token));
  }
  return c;
}
}  // namespace

std::vector<double> RenormalizeByPrior(std::span<const double> raw,
                                       std::span<const double> prior, double alpha) {
  if (raw.size() != prior.size()) {
    throw Error(ErrorKind::kInvalidArgument, "prior and distribution sizes differ");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::kInvalidArgument, "alpha must be finite and >= 0");
  }
  std::vector<double> out(raw.size());
  double total = 0.0;
  for (size_t i = 0; i < raw.size(); ++i) {
    if (!(prior[i] > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "prior entry " + std::to_string(i) + " is not positive");
    }
    out[i] = alpha == 0.0 ? raw[i] : raw[i] / std::pow(prior[i], alpha);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

DeciderModel::DeciderModel(BackoffNGram ngram, std::vector<double> prior, double alpha,
                           double floor)
    : ngram_(std::move(ngram)), prior_(std::move(prior)), alpha_(alpha), floor_(floor) {
  if (static_cast<int>(prior_.size()) != ngram_.num_outcomes()) {
    throw Error(ErrorKind::kInvariantViolation, "decider prior size mismatch");
  }
  for (double p : prior_) {
    if (!(p > 0.0)) throw Error(ErrorKind::kInvariantViolation, "decider prior not positive");
  }
  if (!(floor_ >= 0.0) || floor_ * num_classes() >= 1.0) {
    throw Error(ErrorKind::kInvalidArgument, "decider floor out of range");
  }
  set_alpha(alpha);
}

void DeciderModel::set_alpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorKind::kInvalidArgument, "alpha must be finite and >= 0");
  }
  alpha_ = alpha;
}

std::vector<double> DeciderModel::RawDistribution(std::span<const int> history) const {
  std::vector<double> p = ngram_.Distribution(history);
  const double keep = 1.0 - floor_ * num_classes();
  for (double& v : p) v = keep * v + floor_;
  return p;
}

std::vector<double> DeciderModel::Distribution(std::span<const int> history) const {
  return RenormalizeByPrior(RawDistribution(history), prior_, alpha_);
}

std::string DeciderModel::Serialize() const {
  ByteWriter w;
  w.PutBytes(kMagic);
  w.PutU32(kVersion);
  w.PutF64(alpha_);
  w.PutF64(floor_);
  w.PutU32(static_cast<uint32_t>(prior_.size()));
  for (double p : prior_) w.PutF64(p);
  std::string ngram = ngram_.Serialize();
  w.PutU64(ngram.size());
  w.PutBytes(ngram);
  return w.Release();
}

DeciderModel DeciderModel::Deserialize(std::string_view bytes) {
  ByteReader r(bytes);
  r.ExpectHeader(kMagic, kVersion);
  double alpha = r.GetF64();
  double floor = r.GetF64();
  uint32_t k = r.GetU32();
  if (k == 0 || k > bytes.size() / 8) r.Fail("bad class count");
  std::vector<double> prior(k);
  for (double& p : prior) p = r.GetF64();
  uint64_t n = r.GetU64();
  if (n != bytes.size() - r.offset()) r.Fail("bad embedded n-gram length");
  size_t start = r.offset();
  BackoffNGram ngram = BackoffNGram::Deserialize(bytes.substr(start));
  return DeciderModel(std::move(ngram), std::move(prior), alpha, floor);
}

std::vector<int> ParseTaggedSentence(std::string_view line, const Vocabulary& vocab,
                                     const ClassAlphabet& classes) {
  std::vector<int> out;
  for (std::string_view tok : SplitWhitespace(line)) {
    if (!tok.empty() && tok.front() == '@') {
      auto c = classes.Find(tok);
      if (!c || classes.IsBackground(*c)) {
        throw Error(ErrorKind::kUnknownSymbol, "class token '" + std::string(tok) + "'");
      }
      out.push_back(vocab.class_token_base() + *c);
    } else {
      out.push_back(vocab.Id(tok));
    }
  }
  return out;
}

std::string FormatTaggedSentence(std::span<const int> tokens, const Vocabulary& vocab,
                                 const ClassAlphabet& classes) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    if (tokens[i] >= vocab.class_token_base()) {
      out += classes.Label(tokens[i] - vocab.class_token_base());
    } else {
      out += vocab.Symbol(tokens[i]);
    }
  }
  return out;
}

std::vector<double> ClassPrior(const std::vector<std::vector<int>>& tagged,
                               const Vocabulary& vocab, const ClassAlphabet& classes) {
  std::vector<double> counts(classes.size(), 1.0);
  double total = classes.size();
  for (const auto& sentence : tagged) {
    for (int t : sentence) {
      counts[ClassOf(t, vocab, classes)] += 1.0;
      total += 1.0;
    }
  }
  for (double& c : counts) c /= total;
  return counts;
}

DeciderModel TrainDecider(const std::vector<std::vector<int>>& tagged,
                          const std::vector<std::vector<int>>& prior_corpus,
                          const Vocabulary& vocab, const ClassAlphabet& classes,
                          const DeciderOptions& options) {
  if (tagged.empty()) throw Error(ErrorKind::kEmptyInput, "decider corpus is empty");
  BackoffNGram::Counter counter(options.order, classes.size(),
                                vocab.class_token_base() + classes.size(), vocab.bos());
  for (const auto& sentence : tagged) {
    for (size_t i = 0; i < sentence.size(); ++i) {
      counter.Add(std::span<const int>(sentence).first(i),
                  ClassOf(sentence[i], vocab, classes));
    }
    counter.Add(sentence, classes.background());
  }
  return DeciderModel(std::move(counter).Finish(options.discount),
                      ClassPrior(prior_corpus, vocab, classes), options.alpha,
                      options.floor);
}

}  // namespace nfclm
