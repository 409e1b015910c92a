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

#ifndef NFCLM_SEQ_MODEL_H_
#define NFCLM_SEQ_MODEL_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace nfclm {

class Vocabulary;

// P(next outcome | history). Outcomes are 0..num_outcomes()-1; history tokens
// come from a possibly larger alphabet. Every implementation returns a
// strictly positive distribution that sums to one.
class ConditionalSymbolModel {
 public:
  virtual ~ConditionalSymbolModel() = default;

  virtual int num_outcomes() const = 0;
  virtual double Prob(int outcome, std::span<const int> history) const = 0;
  virtual std::vector<double> Distribution(std::span<const int> history) const;
  double LogProb(int outcome, std::span<const int> history) const;

  // Versioned binary encoding; see DeserializeSymbolModel.
  virtual std::string Serialize() const = 0;
};

// Dispatches on the magic tag of a serialized model.
std::unique_ptr<ConditionalSymbolModel> DeserializeSymbolModel(std::string_view bytes);

class UniformModel final : public ConditionalSymbolModel {
 public:
  explicit UniformModel(int num_outcomes);

  int num_outcomes() const override { return num_outcomes_; }
  double Prob(int outcome, std::span<const int> history) const override;
  std::vector<double> Distribution(std::span<const int> history) const override;
  std::string Serialize() const override;
  static UniformModel Deserialize(std::string_view bytes);

 private:
  int num_outcomes_;
};

struct TokenSequenceHash {
  size_t operator()(const std::vector<int>& tokens) const noexcept {
    uint64_t h = 1469598103934665603ull;
    for (int t : tokens) {
      h ^= static_cast<uint32_t>(t);
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h ^ (h >> 32));
  }
};

// Interpolated absolute-discounting n-gram:
//
//   P(w | h) = (max(c(h, w) - d, 0) + d * N1+(h) * P(w | h')) / c(h)
//
// where h' drops the oldest context token and the recursion bottoms out at
// the uniform distribution. Contexts never seen in training defer entirely
// to the shorter context. Histories are left-padded with pad_token.
class BackoffNGram final : public ConditionalSymbolModel {
 public:
  struct ContextStats {
    uint64_t total = 0;
    // Sorted by outcome.
    std::vector<std::pair<int, uint64_t>> counts;
  };

  // Accumulates (history, outcome) events. Histories are unpadded.
  class Counter {
   public:
    Counter(int order, int num_outcomes, int num_history_tokens, int pad_token);
    void Add(std::span<const int> history, int outcome);
    BackoffNGram Finish(double discount) &&;

   private:
    int order_, num_outcomes_, num_history_tokens_, pad_token_;
    std::vector<std::unordered_map<std::vector<int>,
                                   std::unordered_map<int, uint64_t>,
                                   TokenSequenceHash>> counts_;
  };

  int order() const { return order_; }
  double discount() const { return discount_; }
  int num_outcomes() const override { return num_outcomes_; }
  int num_history_tokens() const { return num_history_tokens_; }
  int pad_token() const { return pad_token_; }

  double Prob(int outcome, std::span<const int> history) const override;
  std::vector<double> Distribution(std::span<const int> history) const override;

  std::string Serialize() const override;
  static BackoffNGram Deserialize(std::string_view bytes);
  // One "order<TAB>context<TAB>outcome<TAB>count" line per stored count.
  void WriteCounts(std::ostream& out) const;

  bool operator==(const BackoffNGram& other) const;

 private:
  BackoffNGram() = default;
  void CheckHistory(std::span<const int> history) const;
  std::vector<int> Context(std::span<const int> history, int length) const;

  int order_ = 1;
  double discount_ = 0.75;
  int num_outcomes_ = 0;
  int num_history_tokens_ = 0;
  int pad_token_ = 0;
  std::vector<std::unordered_map<std::vector<int>, ContextStats, TokenSequenceHash>> tables_;
};

struct NGramOptions {
  int order = 3;
  double discount = 0.75;
};

// Background LM over V plus EOS: every sentence is BOS-padded and terminated
// by an EOS event. Symbols must be vocabulary ids.
BackoffNGram TrainBackgroundNGram(const std::vector<std::vector<int>>& corpus,
                                  const Vocabulary& vocab, const NGramOptions& options);

}  // namespace nfclm

#endif  // NFCLM_SEQ_MODEL_H_
