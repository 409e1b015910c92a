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

#include "nfclm/vocab.h"

#include <algorithm>
#include <fstream>
#include <istream>

#include "nfclm/error.h"
#include "nfclm/text_io.h"

namespace nfclm {

namespace {
const std::string kBos(Vocabulary::kBosString);
const std::string kEos(Vocabulary::kEosString);
const std::string kEpsilonLabel = "<eps>";
}  // namespace

Vocabulary Vocabulary::FromSymbols(std::vector<std::string> symbols) {
  if (symbols.empty()) throw Error(ErrorKind::kEmptyInput, "vocabulary has no symbols");
  Vocabulary v;
  v.symbols_ = std::move(symbols);
  for (size_t i = 0; i < v.symbols_.size(); ++i) {
    const std::string& s = v.symbols_[i];
    if (s.empty()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "empty symbol on line " + std::to_string(i + 1));
    }
    if (s == kBos || s == kEos) {
      throw Error(ErrorKind::kInvalidArgument,
                  "reserved sentinel '" + s + "' on line " + std::to_string(i + 1));
    }
    if (s.find_first_of(" \t\r\n") != std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument,
                  "whitespace inside symbol on line " + std::to_string(i + 1));
    }
    auto [it, inserted] = v.index_.emplace(s, static_cast<int>(i));
    if (!inserted) {
      throw Error(ErrorKind::kDuplicateSymbol,
                  "'" + s + "' on line " + std::to_string(i + 1) +
                      " (first seen on line " + std::to_string(it->second + 1) + ")");
    }
    v.max_symbol_bytes_ = std::max(v.max_symbol_bytes_, s.size());
  }
  return v;
}

Vocabulary Vocabulary::Load(std::istream& in) {
  std::vector<std::string> lines = ReadLines(in);
  // A single trailing blank line is an artifact of the final newline.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return FromSymbols(std::move(lines));
}

Vocabulary Vocabulary::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open vocabulary " + path.string());
  return Load(in);
}

std::optional<int> Vocabulary::Find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Vocabulary::Id(std::string_view symbol) const {
  if (auto id = Find(symbol)) return *id;
  throw Error(ErrorKind::kUnknownSymbol, "'" + std::string(symbol) + "'");
}

const std::string& Vocabulary::Symbol(int id) const {
  if (id == eos()) return kEos;
  if (id == bos()) return kBos;
  if (!IsSymbol(id)) {
    throw Error(ErrorKind::kUnknownSymbol, "symbol id " + std::to_string(id));
  }
  return symbols_[id];
}

std::vector<int> Vocabulary::Tokenize(std::string_view text) const {
  std::vector<int> out;
  for (std::string_view word : SplitWhitespace(text)) {
    std::string marked;
    marked.reserve(word.size() + 1);
    marked.push_back(kWordBoundary);
    marked.append(word);
    size_t pos = 0;
    while (pos < marked.size()) {
      size_t longest = std::min(max_symbol_bytes_, marked.size() - pos);
      std::optional<int> match;
      size_t match_len = 0;
      for (size_t len = longest; len > 0; --len) {
        auto it = index_.find(marked.substr(pos, len));
        if (it != index_.end()) {
          match = it->second;
          match_len = len;
          break;
        }
      }
      if (!match) {
        throw Error(ErrorKind::kUntokenizable,
                    "word '" + std::string(word) + "' at offset " +
                        std::to_string(pos == 0 ? 0 : pos - 1));
      }
      out.push_back(*match);
      pos += match_len;
    }
  }
  return out;
}

std::string Vocabulary::Detokenize(std::span<const int> ids) const {
  std::vector<std::string> symbols;
  symbols.reserve(ids.size());
  for (int id : ids) symbols.push_back(Symbol(id));
  return nfclm::Detokenize(symbols);
}

std::vector<int> Vocabulary::ParseSymbols(std::string_view line) const {
  std::vector<int> out;
  for (std::string_view tok : SplitWhitespace(line)) out.push_back(Id(tok));
  return out;
}

std::string Vocabulary::JoinSymbols(std::span<const int> ids) const {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out.push_back(' ');
    out += Symbol(ids[i]);
  }
  return out;
}

std::string Vocabulary::ToText() const {
  std::string out;
  for (const auto& s : symbols_) {
    out += s;
    out.push_back('\n');
  }
  return out;
}

std::string Detokenize(std::span<const std::string> symbols) {
  std::string out;
  for (const auto& s : symbols) {
    if (!s.empty() && s.front() == Vocabulary::kWordBoundary) {
      out.push_back(' ');
      out.append(s, 1, std::string::npos);
    } else {
      out += s;
    }
  }
  return std::string(Trim(out));
}

ClassAlphabet ClassAlphabet::FromLabels(std::vector<std::string> labels) {
  if (labels.empty()) throw Error(ErrorKind::kEmptyInput, "class alphabet is empty");
  ClassAlphabet a;
  a.labels_ = std::move(labels);
  for (size_t i = 0; i < a.labels_.size(); ++i) {
    const std::string& l = a.labels_[i];
    if (l.size() < 2 || l.front() != '@') {
      throw Error(ErrorKind::kInvalidArgument,
                  "class label '" + l + "' must start with '@'");
    }
    if (!a.index_.emplace(l, static_cast<int>(i)).second) {
      throw Error(ErrorKind::kDuplicateSymbol, "class label '" + l + "'");
    }
    if (l == kBackgroundLabel) a.background_ = static_cast<int>(i);
  }
  if (a.background_ < 0) {
    throw Error(ErrorKind::kInvalidArgument, "class alphabet lacks @bg");
  }
  return a;
}

ClassAlphabet ClassAlphabet::Load(std::istream& in) {
  std::vector<std::string> lines = ReadLines(in);
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return FromLabels(std::move(lines));
}

ClassAlphabet ClassAlphabet::LoadFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open class alphabet " + path.string());
  return Load(in);
}

std::optional<int> ClassAlphabet::Find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int ClassAlphabet::Id(std::string_view label) const {
  if (auto id = Find(label)) return *id;
  throw Error(ErrorKind::kUnknownSymbol, "class '" + std::string(label) + "'");
}

const std::string& ClassAlphabet::Label(int id) const {
  if (id == kEpsilon) return kEpsilonLabel;
  if (id < 0 || id >= size()) {
    throw Error(ErrorKind::kUnknownSymbol, "class id " + std::to_string(id));
  }
  return labels_[id];
}

void ClassAlphabet::CheckDisjoint(const Vocabulary& vocab) const {
  for (const auto& l : labels_) {
    if (vocab.Find(l)) {
      throw Error(ErrorKind::kInvariantViolation,
                  "class label '" + l + "' is also a vocabulary symbol");
    }
  }
}

std::string ClassAlphabet::ToText() const {
  std::string out;
  for (const auto& l : labels_) {
    out += l;
    out.push_back('\n');
  }
  return out;
}

}  // namespace nfclm
