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

#ifndef NFCLM_VOCAB_H_
#define NFCLM_VOCAB_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nfclm {

// Sub-word symbol inventory V.
//
// Ids 0..size()-1 are the symbols in file order. Two sentinels follow:
// eos() == size() and bos() == size() + 1. EOS is a predictable outcome of
// the background model, BOS only ever appears as left padding in histories.
// Decider histories mix symbols and class tokens; class k is encoded as
// class_token_base() + k.
class Vocabulary {
 public:
  static constexpr std::string_view kBosString = "<s>";
  static constexpr std::string_view kEosString = "</s>";
  static constexpr char kWordBoundary = '_';

  Vocabulary() = default;

  static Vocabulary FromSymbols(std::vector<std::string> symbols);
  static Vocabulary Load(std::istream& in);
  static Vocabulary LoadFile(const std::filesystem::path& path);

  // |V|, sentinels excluded.
  int size() const { return static_cast<int>(symbols_.size()); }
  int eos() const { return size(); }
  int bos() const { return size() + 1; }
  // V plus EOS: the outcome space of next-symbol distributions.
  int num_outcomes() const { return size() + 1; }
  int class_token_base() const { return size() + 2; }

  std::optional<int> Find(std::string_view symbol) const;
  // Like Find but throws Error(kUnknownSymbol).
  int Id(std::string_view symbol) const;
  // Accepts sentinel ids as well.
  const std::string& Symbol(int id) const;
  bool IsSymbol(int id) const { return id >= 0 && id < size(); }

  // Greedy longest-match segmentation of whitespace-separated words; each
  // word is prefixed with the boundary marker before matching.
  std::vector<int> Tokenize(std::string_view text) const;
  std::string Detokenize(std::span<const int> ids) const;

  // Pre-tokenized text: whitespace-separated symbol strings.
  std::vector<int> ParseSymbols(std::string_view line) const;
  std::string JoinSymbols(std::span<const int> ids) const;

  std::string ToText() const;
  const std::vector<std::string>& symbols() const { return symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
  size_t max_symbol_bytes_ = 0;
};

// Boundary markers become single spaces; leading/trailing spaces trimmed.
std::string Detokenize(std::span<const std::string> symbols);

// The class set C. Labels start with '@'; "@bg" is mandatory and unique. The
// continuation label epsilon is not a member and is written kEpsilon
// wherever alignments are stored.
inline constexpr int kEpsilon = -1;

class ClassAlphabet {
 public:
  static constexpr std::string_view kBackgroundLabel = "@bg";

  ClassAlphabet() = default;

  static ClassAlphabet FromLabels(std::vector<std::string> labels);
  static ClassAlphabet Load(std::istream& in);
  static ClassAlphabet LoadFile(const std::filesystem::path& path);

  int size() const { return static_cast<int>(labels_.size()); }
  int background() const { return background_; }
  bool IsBackground(int id) const { return id == background_; }

  std::optional<int> Find(std::string_view label) const;
  int Id(std::string_view label) const;
  // kEpsilon renders as "<eps>".
  const std::string& Label(int id) const;
  const std::vector<std::string>& labels() const { return labels_; }

  // Throws kInvariantViolation if any label is also a vocabulary symbol.
  void CheckDisjoint(const Vocabulary& vocab) const;
  std::string ToText() const;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
  int background_ = -1;
};

}  // namespace nfclm

#endif  // NFCLM_VOCAB_H_
