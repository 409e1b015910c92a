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

#include "nfclm/bundle.h"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "nfclm/error.h"
#include "nfclm/text_io.h"

namespace nfclm {

namespace {

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double ParseDouble(std::string_view text, const std::string& key) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::kMalformedData, "manifest value for " + key);
  }
  return v;
}

std::string FstFileName(const std::string& label) {
  std::string name = label.substr(1);
  for (char& c : name) {
    if (c == '/' || c == '\\') c = '_';
  }
  return "fst/" + name + ".fst";
}

std::string ReadComponent(const std::filesystem::path& dir, const std::string& file,
                          const std::string& name) {
  std::filesystem::path path = dir / file;
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorKind::kMissingComponent, name + " (" + path.string() + ")");
  }
  return ReadFileBytes(path);
}

}  // namespace

std::vector<ComponentSize> PackBundle(const NfclmModel& model, const BeamOptions& beam,
                                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "fst");
  std::vector<ComponentSize> sizes;
  std::ostringstream manifest;
  manifest << "nfclm-bundle\t" << kBundleVersion << '\n';
  auto write = [&](const std::string& name, const std::string& file, const std::string& bytes) {
    WriteFileBytes(dir / file, bytes);
    sizes.push_back({name, file, bytes.size()});
  };
  write("vocabulary", "vocab.txt", model.vocab().ToText());
  manifest << "vocabulary\tvocab.txt\n";
  write("classes", "classes.txt", model.classes().ToText());
  manifest << "classes\tclasses.txt\n";
  write("background", "background.bin", model.background().Serialize());
  manifest << "background\tbackground.bin\n";
  write("decider", "decider.bin", model.decider().Serialize());
  manifest << "decider\tdecider.bin\n";
  for (int c = 0; c < model.classes().size(); ++c) {
    if (model.classes().IsBackground(c)) continue;
    const std::string& label = model.classes().Label(c);
    std::string file = FstFileName(label);
    write("fst " + label, file, model.fst(c).Serialize());
    manifest << "fst\t" << label << '\t' << file << '\n';
  }
  manifest << "alpha\t" << FormatDouble(model.decider().alpha()) << '\n';
  manifest << "beam-n\t" << beam.max_hypotheses << '\n';
  manifest << "beam-delta\t" << FormatDouble(beam.delta) << '\n';
  manifest << "beam-renormalize\t" << (beam.renormalize ? 1 : 0) << '\n';
  WriteFileBytes(dir / kManifestName, manifest.str());
  return sizes;
}

LoadedBundle LoadBundle(const std::filesystem::path& dir) {
  std::filesystem::path manifest_path = dir / kManifestName;
  if (!std::filesystem::is_regular_file(manifest_path)) {
    throw Error(ErrorKind::kMissingComponent, "manifest (" + manifest_path.string() + ")");
  }
  std::vector<std::string> lines = ReadLinesFromFile(manifest_path);
  std::map<std::string, std::string> single;
  std::vector<std::pair<std::string, std::string>> fst_entries;
  bool header = false;
  for (const std::string& line : lines) {
    if (Trim(line).empty()) continue;
    auto fields = Split(line, '\t');
    std::string key(Trim(fields[0]));
    if (!header) {
      if (key != "nfclm-bundle" || fields.size() != 2) {
        throw Error(ErrorKind::kMalformedData, "manifest header missing");
      }
      if (std::string(Trim(fields[1])) != std::to_string(kBundleVersion)) {
        throw Error(ErrorKind::kVersionMismatch,
                    "bundle version " + std::string(fields[1]) + ", expected " +
                        std::to_string(kBundleVersion));
      }
      header = true;
      continue;
    }
    if (key == "fst") {
      if (fields.size() != 3) throw Error(ErrorKind::kMalformedData, "manifest fst line");
      fst_entries.emplace_back(std::string(fields[1]), std::string(fields[2]));
    } else {
      if (fields.size() != 2) throw Error(ErrorKind::kMalformedData, "manifest line " + key);
      single[key] = std::string(fields[1]);
    }
  }
  if (!header) throw Error(ErrorKind::kMalformedData, "manifest is empty");
  auto need = [&](const std::string& key) -> const std::string& {
    auto it = single.find(key);
    if (it == single.end()) throw Error(ErrorKind::kMissingComponent, key + " (manifest)");
    return it->second;
  };

  std::vector<ComponentSize> sizes;
  auto load = [&](const std::string& name, const std::string& file) {
    std::string bytes = ReadComponent(dir, file, name);
    sizes.push_back({name, file, bytes.size()});
    return bytes;
  };
  std::istringstream vocab_text(load("vocabulary", need("vocabulary")));
  Vocabulary vocab = Vocabulary::Load(vocab_text);
  std::istringstream class_text(load("classes", need("classes")));
  ClassAlphabet classes = ClassAlphabet::Load(class_text);
  std::shared_ptr<const ConditionalSymbolModel> background =
      DeserializeSymbolModel(load("background", need("background")));
  DeciderModel decider = DeciderModel::Deserialize(load("decider", need("decider")));
  std::vector<ClassFst> fsts;
  for (const auto& [label, file] : fst_entries) {
    ClassFst fst = ClassFst::Deserialize(load("fst " + label, file));
    if (fst.label() != label) {
      throw Error(ErrorKind::kInvariantViolation,
                  "automaton file " + file + " holds class " + fst.label() + ", manifest says " +
                      label);
    }
    fsts.push_back(std::move(fst));
  }
  if (single.count("alpha")) decider.set_alpha(ParseDouble(single["alpha"], "alpha"));

  BeamOptions beam;
  if (single.count("beam-n")) {
    double n = ParseDouble(single["beam-n"], "beam-n");
    if (!(n >= 1) || n != std::floor(n) || n > 1e9) {
      throw Error(ErrorKind::kMalformedData, "manifest beam-n");
    }
    beam.max_hypotheses = static_cast<int>(n);
  }
  if (single.count("beam-delta")) beam.delta = ParseDouble(single["beam-delta"], "beam-delta");
  if (single.count("beam-renormalize")) {
    beam.renormalize = single["beam-renormalize"] != "0";
  }
  NfclmModel model(std::move(vocab), std::move(classes), std::move(background),
                   std::move(fsts), std::move(decider));
  return LoadedBundle{std::move(model), beam, std::move(sizes)};
}

}  // namespace nfclm
