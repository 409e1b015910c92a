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

#include "nfclm/class_fst.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>

#include "nfclm/binary_io.h"
#include "nfclm/error.h"
#include "nfclm/text_io.h"
#include "nfclm/vocab.h"

namespace nfclm {

namespace {

constexpr std::string_view kMagic = "NFCF";
constexpr uint32_t kVersion = 1;

double ParseCount(std::string_view text, size_t line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(value > 0.0) ||
      !std::isfinite(value)) {
    throw Error(ErrorKind::kInvalidArgument,
                "bad entity count '" + std::string(text) + "' on line " +
                    std::to_string(line_no));
  }
  return value;
}

}  // namespace

std::vector<Entity> ParseEntities(std::istream& in, const Vocabulary& vocab) {
  std::vector<Entity> entities;
  size_t line_no = 0;
  for (const std::string& line : ReadLines(in)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    std::string_view body = line;
    Entity e;
    size_t tab = body.find('\t');
    if (tab != std::string_view::npos) {
      e.count = ParseCount(Trim(body.substr(tab + 1)), line_no);
      body = body.substr(0, tab);
    }
    for (std::string_view tok : SplitWhitespace(body)) {
      auto id = vocab.Find(tok);
      if (!id) {
        throw Error(ErrorKind::kUnknownSymbol,
                    "'" + std::string(tok) + "' on entity line " + std::to_string(line_no));
      }
      e.symbols.push_back(*id);
    }
    if (e.symbols.empty()) {
      throw Error(ErrorKind::kEmptyEntity, "entity line " + std::to_string(line_no));
    }
    entities.push_back(std::move(e));
  }
  return entities;
}

std::vector<Entity> LoadEntitiesFile(const std::filesystem::path& path,
                                     const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open entity list " + path.string());
  return ParseEntities(in, vocab);
}

ClassFst ClassFst::Build(std::string label, std::vector<Entity> entities) {
  if (entities.empty()) {
    throw Error(ErrorKind::kEmptyEntity, "class " + label + " has no entities");
  }
  for (const Entity& e : entities) {
    if (e.symbols.empty()) {
      throw Error(ErrorKind::kEmptyEntity, "class " + label + " has an empty entity");
    }
    if (!(e.count > 0.0) || !std::isfinite(e.count)) {
      throw Error(ErrorKind::kInvalidArgument,
                  "class " + label + " has a non-positive entity count");
    }
  }
  // Canonical order makes the result independent of input order, including
  // the floating-point order in which duplicate counts are summed.
  std::sort(entities.begin(), entities.end(), [](const Entity& a, const Entity& b) {
    if (a.symbols != b.symbols) return a.symbols < b.symbols;
    return a.count < b.count;
  });

  struct Node {
    std::map<int, int> children;
    double end_weight = 0.0;
    double weight = 0.0;
  };
  std::vector<Node> nodes(1);
  for (const Entity& e : entities) {
    int node = 0;
    for (int sym : e.symbols) {
      auto it = nodes[node].children.find(sym);
      if (it == nodes[node].children.end()) {
        int fresh = static_cast<int>(nodes.size());
        nodes[node].children.emplace(sym, fresh);
        nodes.emplace_back();
        node = fresh;
      } else {
        node = it->second;
      }
    }
    nodes[node].end_weight += e.count;
  }
  // Sorted insertion numbers nodes in preorder, so children always have larger
  // ids and a reverse sweep is a valid post-order.
  for (int i = static_cast<int>(nodes.size()) - 1; i >= 0; --i) {
    double w = nodes[i].end_weight;
    for (const auto& [sym, child] : nodes[i].children) w += nodes[child].weight;
    nodes[i].weight = w;
  }

  ClassFst fst;
  fst.label_ = std::move(label);
  fst.num_entities_ = entities.size();
  fst.total_weight_ = nodes[0].weight;
  fst.states_.resize(nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    State& s = fst.states_[i];
    s.exit = n.end_weight / n.weight;
    s.arcs.reserve(n.children.size());
    for (const auto& [sym, child] : n.children) {
      s.arcs.push_back({sym, nodes[child].weight / n.weight, child});
    }
  }
  return fst;
}

int ClassFst::num_arcs() const {
  int n = 0;
  for (const auto& s : states_) n += static_cast<int>(s.arcs.size());
  return n;
}

const ClassFst::State& ClassFst::CheckedState(int state) const {
  if (state < 0 || state >= num_states()) {
    throw Error(ErrorKind::kUnknownState,
                "state " + std::to_string(state) + " in class " + label_);
  }
  return states_[state];
}

std::optional<int> ClassFst::Step(int state, int symbol) const {
  const auto& arcs = CheckedState(state).arcs;
  auto it = std::lower_bound(arcs.begin(), arcs.end(), symbol,
                             [](const FstArc& a, int s) { return a.symbol < s; });
  if (it == arcs.end() || it->symbol != symbol) return std::nullopt;
  return it->next;
}

double ClassFst::ArcProb(int state, int symbol) const {
  const auto& arcs = CheckedState(state).arcs;
  auto it = std::lower_bound(arcs.begin(), arcs.end(), symbol,
                             [](const FstArc& a, int s) { return a.symbol < s; });
  if (it == arcs.end() || it->symbol != symbol) return 0.0;
  return it->prob;
}

double ClassFst::ExitProb(int state) const { return CheckedState(state).exit; }

std::span<const FstArc> ClassFst::Arcs(int state) const { return CheckedState(state).arcs; }

std::string ClassFst::Serialize() const {
  ByteWriter w;
  w.PutBytes(kMagic);
  w.PutU32(kVersion);
  w.PutString(label_);
  w.PutU64(num_entities_);
  w.PutF64(total_weight_);
  w.PutU32(static_cast<uint32_t>(states_.size()));
  for (const State& s : states_) {
    w.PutF64(s.exit);
    w.PutU32(static_cast<uint32_t>(s.arcs.size()));
    for (const FstArc& a : s.arcs) {
      w.PutI32(a.symbol);
      w.PutF64(a.prob);
      w.PutU32(static_cast<uint32_t>(a.next));
    }
  }
  return w.Release();
}

ClassFst ClassFst::Deserialize(std::string_view bytes) {
  ByteReader r(bytes);
  r.ExpectHeader(kMagic, kVersion);
  ClassFst fst;
  fst.label_ = r.GetString();
  fst.num_entities_ = r.GetU64();
  fst.total_weight_ = r.GetF64();
  uint32_t num_states = r.GetU32();
  // Each state needs at least 12 bytes; reject absurd counts before allocating.
  if (num_states == 0 || num_states > bytes.size() / 12) r.Fail("bad state count");
  fst.states_.resize(num_states);
  for (State& s : fst.states_) {
    s.exit = r.GetF64();
    uint32_t num_arcs = r.GetU32();
    if (num_arcs > (bytes.size() - r.offset()) / 16) r.Fail("bad arc count");
    s.arcs.resize(num_arcs);
    for (FstArc& a : s.arcs) {
      a.symbol = r.GetI32();
      a.prob = r.GetF64();
      uint32_t next = r.GetU32();
      if (next >= num_states) r.Fail("arc destination out of range");
      a.next = static_cast<int>(next);
    }
  }
  r.ExpectEnd();
  fst.Validate();
  return fst;
}

void ClassFst::WriteText(std::ostream& out, const Vocabulary* vocab) const {
  auto flags = out.flags();
  auto precision = out.precision();
  out << std::setprecision(17);
  for (int s = 0; s < num_states(); ++s) {
    for (const FstArc& a : states_[s].arcs) {
      out << s << ' ';
      if (vocab) {
        out << vocab->Symbol(a.symbol);
      } else {
        out << a.symbol;
      }
      out << ' ' << a.prob << ' ' << a.next << '\n';
    }
    if (states_[s].exit > 0.0) out << s << " EXIT " << states_[s].exit << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

void ClassFst::Validate(double tolerance) const {
  auto fail = [this](int state, const std::string& what) {
    throw Error(ErrorKind::kInvariantViolation,
                "class " + label_ + " state " + std::to_string(state) + ": " + what);
  };
  if (states_.empty()) fail(0, "automaton has no states");
  if (states_[kStart].exit != 0.0) fail(kStart, "start state has nonzero exit probability");
  std::vector<int> in_degree(states_.size(), 0);
  for (int s = 0; s < num_states(); ++s) {
    const State& st = states_[s];
    if (!(st.exit >= 0.0 && st.exit <= 1.0)) fail(s, "exit probability outside [0,1]");
    if (st.exit == 1.0 && !st.arcs.empty()) fail(s, "arcs leave a state with exit 1");
    double total = st.exit;
    for (size_t i = 0; i < st.arcs.size(); ++i) {
      const FstArc& a = st.arcs[i];
      if (a.symbol < 0) fail(s, "negative arc symbol");
      if (i > 0 && st.arcs[i - 1].symbol >= a.symbol) fail(s, "arcs not deterministic");
      if (!(a.prob > 0.0 && a.prob <= 1.0)) fail(s, "arc probability outside (0,1]");
      if (a.next == kStart) fail(s, "loop-back arc to the start state");
      // Forward-only numbering rules out cycles.
      if (a.next <= s) fail(s, "backward arc");
      ++in_degree[a.next];
      total += a.prob;
    }
    if (std::abs(total - 1.0) > tolerance) fail(s, "outgoing mass does not sum to 1");
  }
  for (int s = 1; s < num_states(); ++s) {
    if (in_degree[s] == 0) fail(s, "unreachable state");
  }
}

}  // namespace nfclm
