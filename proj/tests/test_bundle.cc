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


#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "doctest.h"
#include "nfclm/bundle.h"
#include "nfclm/error.h"
#include "nfclm/text_io.h"
#include "test_util.h"

namespace nfclm {
namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() /
           ("nfclm_bundle_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::map<std::string, std::string> FileBytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = ReadFileBytes(e.path());
  }
  return out;
}

NfclmModel ToyWithArtists(const std::vector<std::string>& artists) {
  Vocabulary v = testing::ToyVocab();
  ClassAlphabet c = testing::ToyClasses();
  std::vector<ClassFst> fsts = {testing::ToySongFst(v),
                                ClassFst::Build("@artist", testing::Entities(v, artists))};
  return NfclmModel(v, c, std::make_shared<UniformModel>(v.num_outcomes()), std::move(fsts),
                    testing::ToyDecider(v, c));
}

TEST_CASE("pack and load reproduce scores") {
  TempDir dir("roundtrip");
  NfclmModel m = testing::ToyModel();
  BeamOptions beam;
  beam.max_hypotheses = 7;
  beam.delta = 12.5;
  m.set_alpha(0.75);
  auto sizes = PackBundle(m, beam, dir.path);
  LoadedBundle b = LoadBundle(dir.path);
  CHECK(b.beam.max_hypotheses == 7);
  CHECK(b.beam.delta == 12.5);
  CHECK(b.beam.renormalize);
  CHECK(b.model.decider().alpha() == 0.75);
  const std::vector<std::string> probe = {"_play _ro sie _by _browne", "_by _ro berta _flack",
                                          "salie", ""};
  for (const auto& line : probe) {
    auto s = m.vocab().ParseSymbols(line);
    CHECK(SequenceLogProb(m, s, ScoreMode::kBeam, beam).log_prob ==
          SequenceLogProb(b.model, s, ScoreMode::kBeam, b.beam).log_prob);
  }
  REQUIRE(sizes.size() == b.sizes.size());
  for (size_t i = 0; i < sizes.size(); ++i) CHECK(sizes[i].bytes == b.sizes[i].bytes);
}

TEST_CASE("size report lists each class automaton separately") {
  TempDir dir("sizes");
  auto sizes = PackBundle(testing::ToyModel(), {}, dir.path);
  int fsts = 0;
  for (const auto& s : sizes) {
    CHECK(s.bytes > 0);
    CHECK(fs::file_size(dir.path / s.file) == s.bytes);
    if (s.name.rfind("fst ", 0) == 0) ++fsts;
  }
  CHECK(fsts == 2);
}

TEST_CASE("editing one class changes only that automaton's bytes") {
  TempDir a("diff_a"), b("diff_b");
  PackBundle(ToyWithArtists({"_ro berta _flack", "_browne"}), {}, a.path);
  PackBundle(ToyWithArtists({"_ro berta _flack", "_browne", "_flack"}), {}, b.path);
  auto fa = FileBytes(a.path), fb = FileBytes(b.path);
  REQUIRE(fa.size() == fb.size());
  std::vector<std::string> changed;
  for (const auto& [name, bytes] : fa) {
    if (fb.at(name) != bytes) changed.push_back(name);
  }
  CHECK(changed == std::vector<std::string>{"fst/artist.fst"});
}

TEST_CASE("load errors are named") {
  TempDir dir("errors");
  NfclmModel m = testing::ToyModel();
  auto kind_of = [&] {
    try {
      LoadBundle(dir.path);
    } catch (const Error& e) {
      return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::kIo;
  };
  CHECK(kind_of() == ErrorKind::kMissingComponent);

  PackBundle(m, {}, dir.path);
  fs::remove(dir.path / "fst" / "song.fst");
  CHECK(kind_of() == ErrorKind::kMissingComponent);

  PackBundle(m, {}, dir.path);
  std::string manifest = ReadFileBytes(dir.path / "MANIFEST");
  WriteFileBytes(dir.path / "MANIFEST", "nfclm-bundle\t99\n" + manifest.substr(manifest.find('\n') + 1));
  CHECK(kind_of() == ErrorKind::kVersionMismatch);

  PackBundle(m, {}, dir.path);
  std::string fst = ReadFileBytes(dir.path / "fst" / "song.fst");
  fst[4] = 2;
  WriteFileBytes(dir.path / "fst" / "song.fst", fst);
  CHECK(kind_of() == ErrorKind::kVersionMismatch);

  // An automaton whose probabilities no longer sum to one.
  PackBundle(m, {}, dir.path);
  fst = ReadFileBytes(dir.path / "fst" / "song.fst");
  fst[fst.size() - 1] ^= 0x10;
  WriteFileBytes(dir.path / "fst" / "song.fst", fst);
  ErrorKind k = kind_of();
  CHECK((k == ErrorKind::kInvariantViolation || k == ErrorKind::kMalformedData));

  // Manifest without a decider entry.
  PackBundle(m, {}, dir.path);
  std::string text = ReadFileBytes(dir.path / "MANIFEST");
  const size_t at = text.find("decider\t");
  text.erase(at, text.find('\n', at) - at + 1);
  WriteFileBytes(dir.path / "MANIFEST", text);
  CHECK(kind_of() == ErrorKind::kMissingComponent);
}

}  // namespace
}  // namespace nfclm
