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

#ifndef NFCLM_BUNDLE_H_
#define NFCLM_BUNDLE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nfclm/nfclm.h"

namespace nfclm {

// A model bundle is a directory with a text manifest ("MANIFEST") listing the
// component files, one "key<TAB>value..." line each:
//
//   nfclm-bundle  1
//   vocabulary    vocab.txt
//   classes       classes.txt
//   background    background.bin
//   decider       decider.bin
//   fst           @song  fst/song.fst      (one line per class)
//   alpha / beam-n / beam-delta / beam-renormalize
//
// Every component is written deterministically, so rebuilding one class
// automaton changes only that file.
inline constexpr char kManifestName[] = "MANIFEST";
inline constexpr int kBundleVersion = 1;

struct ComponentSize {
  std::string name;  // "vocabulary", "background", "fst @song", ...
  std::string file;
  uint64_t bytes = 0;
};

struct LoadedBundle {
  NfclmModel model;
  BeamOptions beam;
  std::vector<ComponentSize> sizes;
};

std::vector<ComponentSize> PackBundle(const NfclmModel& model, const BeamOptions& beam,
                                      const std::filesystem::path& dir);

// Throws kMissingComponent, kVersionMismatch or kInvariantViolation (via the
// component loaders) with the offending file named.
LoadedBundle LoadBundle(const std::filesystem::path& dir);

}  // namespace nfclm

#endif  // NFCLM_BUNDLE_H_
