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

// nfclm: command-line front end for building, packing and evaluating factored
// class language models. Machine-readable output is tab-separated UTF-8, one
// record per line.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nfclm/bundle.h"
#include "nfclm/cfg.h"
#include "nfclm/class_fst.h"
#include "nfclm/decider.h"
#include "nfclm/dyn_fst.h"
#include "nfclm/error.h"
#include "nfclm/eval.h"
#include "nfclm/exact.h"
#include "nfclm/nfclm.h"
#include "nfclm/seq_model.h"
#include "nfclm/text_io.h"
#include "nfclm/vocab.h"

namespace {

using nfclm::Error;
using nfclm::ErrorKind;

struct GlobalFlags {
  uint64_t seed = 0;
  int beam_n = 100;
  double beam_delta = 30.0;
  double alpha = 1.0;
  bool exact = false;
  bool no_renormalize = false;
  int threads = 1;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* beam_n_opt = nullptr;
  CLI::Option* beam_delta_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
};

std::string Num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

uint64_t ResolveSeed(const GlobalFlags& g) {
  if (g.seed_opt->count() > 0) return g.seed;
  if (const char* env = std::getenv("NFCLM_SEED")) {
    uint64_t v = 0;
    std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw Error(ErrorKind::kInvalidArgument, "NFCLM_SEED is not an unsigned integer");
    }
    return v;
  }
  return 0;
}

// Output goes to `path`, or stdout when empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw Error(ErrorKind::kIo, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<std::string> InputLines(const std::string& path) {
  if (path.empty() || path == "-") return nfclm::ReadLines(std::cin);
  return nfclm::ReadLinesFromFile(path);
}

std::vector<std::string> NonEmpty(std::vector<std::string> lines) {
  std::vector<std::string> out;
  for (auto& l : lines) {
    if (!nfclm::Trim(l).empty()) out.push_back(std::move(l));
  }
  return out;
}

std::vector<std::vector<int>> ReadCorpus(const std::string& path, const nfclm::Vocabulary& vocab,
                                         bool raw) {
  std::vector<std::vector<int>> corpus;
  size_t line_no = 0;
  for (const std::string& line : InputLines(path)) {
    ++line_no;
    if (nfclm::Trim(line).empty()) continue;
    try {
      corpus.push_back(raw ? vocab.Tokenize(line) : vocab.ParseSymbols(line));
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
    }
  }
  return corpus;
}

nfclm::LoadedBundle OpenBundle(const std::string& dir, const GlobalFlags& g) {
  nfclm::LoadedBundle b = nfclm::LoadBundle(dir);
  if (g.beam_n_opt->count() > 0) b.beam.max_hypotheses = g.beam_n;
  if (g.beam_delta_opt->count() > 0) b.beam.delta = g.beam_delta;
  if (g.no_renormalize) b.beam.renormalize = false;
  if (g.alpha_opt->count() > 0) b.model.set_alpha(g.alpha);
  return b;
}

nfclm::ScoreMode Mode(const GlobalFlags& g) {
  return g.exact ? nfclm::ScoreMode::kExact : nfclm::ScoreMode::kBeam;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Factored class language model toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags g;
  g.seed_opt = app.add_option("--seed", g.seed, "Random seed (fallback: NFCLM_SEED, then 0)");
  g.beam_n_opt = app.add_option("--beam-n", g.beam_n, "Maximum alignments kept per history")
                     ->check(CLI::PositiveNumber);
  g.beam_delta_opt =
      app.add_option("--beam-delta", g.beam_delta, "Log-probability band (natural log)")
          ->check(CLI::NonNegativeNumber);
  g.alpha_opt = app.add_option("--alpha", g.alpha, "Decider prior renormalization exponent")
                    ->check(CLI::NonNegativeNumber);
  app.add_flag("--exact", g.exact, "Score by exhaustive alignment enumeration");
  app.add_flag("--no-renormalize", g.no_renormalize,
               "Do not renormalize alignment posteriors inside the beam");
  app.add_option("--threads", g.threads, "Worker threads for corpus scoring")
      ->check(CLI::PositiveNumber);

  std::string vocab_path, classes_path, out_path, corpus_path, bundle_dir;
  bool raw_text = false;

  // build-fst
  auto* build_fst = app.add_subcommand("build-fst", "Build a class automaton from an entity list");
  std::string entities_path, class_label, text_dump;
  build_fst->add_option("--vocab", vocab_path)->required();
  build_fst->add_option("--entities", entities_path)->required();
  build_fst->add_option("--class", class_label, "Class label (default: entity file stem)");
  build_fst->add_option("--out", out_path)->required();
  build_fst->add_option("--text", text_dump, "Also write a text dump here ('-' for stdout)");

  // train-bglm
  auto* train_bglm = app.add_subcommand("train-bglm", "Train the background n-gram");
  nfclm::NGramOptions ngram_options;
  std::string counts_dump;
  train_bglm->add_option("--vocab", vocab_path)->required();
  train_bglm->add_option("--corpus", corpus_path)->required();
  train_bglm->add_option("--order", ngram_options.order)->check(CLI::PositiveNumber);
  train_bglm->add_option("--discount", ngram_options.discount)->check(CLI::Range(0.0, 1.0));
  train_bglm->add_option("--out", out_path)->required();
  train_bglm->add_option("--counts", counts_dump, "Also write a text dump of counts");

  // train-decider
  auto* train_decider = app.add_subcommand("train-decider", "Train the class decider");
  nfclm::DeciderOptions decider_options;
  std::string prior_path;
  train_decider->add_option("--vocab", vocab_path)->required();
  train_decider->add_option("--classes", classes_path)->required();
  train_decider->add_option("--corpus", corpus_path, "Tagged training corpus")->required();
  train_decider->add_option("--prior-corpus", prior_path,
                            "Tagged CFG corpus for class frequencies (default: --corpus)");
  train_decider->add_option("--order", decider_options.order)->check(CLI::PositiveNumber);
  train_decider->add_option("--discount", decider_options.discount)->check(CLI::Range(0.0, 1.0));
  train_decider->add_option("--floor", decider_options.floor);
  train_decider->add_option("--out", out_path)->required();

  // expand-cfg
  auto* expand_cfg = app.add_subcommand("expand-cfg", "Sample sentences from a pattern grammar");
  std::string patterns_path, entity_dir;
  int num_samples = 1;
  bool tagged = false;
  expand_cfg->add_option("--vocab", vocab_path)->required();
  expand_cfg->add_option("--classes", classes_path)->required();
  expand_cfg->add_option("--patterns", patterns_path)->required();
  expand_cfg->add_option("--entity-dir", entity_dir)->required();
  expand_cfg->add_option("-n,--num", num_samples)->check(CLI::PositiveNumber);
  expand_cfg->add_flag("--tagged", tagged, "Emit class tokens instead of entities");
  expand_cfg->add_option("--out", out_path);

  // mix
  auto* mix = app.add_subcommand("mix", "Mix background and CFG training lines");
  std::string background_lines, cfg_lines;
  double fraction = 0.1;
  std::optional<size_t> total;
  mix->add_option("--background", background_lines)->required();
  mix->add_option("--cfg", cfg_lines)->required();
  mix->add_option("--fraction", fraction, "Background share of the output")
      ->check(CLI::Range(0.0, 1.0));
  mix->add_option("--total", total, "Output lines (default: both inputs combined)");
  mix->add_option("--out", out_path);

  // pack
  auto* pack = app.add_subcommand("pack", "Assemble a model bundle directory");
  std::string background_path, decider_path;
  std::vector<std::string> fst_paths;
  pack->add_option("--vocab", vocab_path)->required();
  pack->add_option("--classes", classes_path)->required();
  pack->add_option("--background", background_path)->required();
  pack->add_option("--decider", decider_path)->required();
  pack->add_option("--fst", fst_paths, "Class automaton file (repeatable)");
  pack->add_option("--out", out_path, "Bundle directory")->required();

  // score
  auto* score = app.add_subcommand("score", "Per-sentence log-probabilities");
  score->add_option("--bundle", bundle_dir)->required();
  score->add_option("--corpus", corpus_path, "Corpus (default stdin)");
  score->add_flag("--raw", raw_text, "Input is untokenized text");
  score->add_option("--out", out_path);

  // ppl
  auto* ppl = app.add_subcommand("ppl", "Corpus perplexity");
  bool background_only = false, skip_dead = false;
  ppl->add_option("--bundle", bundle_dir)->required();
  ppl->add_option("--corpus", corpus_path, "Corpus (default stdin)");
  ppl->add_flag("--raw", raw_text, "Input is untokenized text");
  ppl->add_flag("--background-only", background_only, "Score with the background model alone");
  ppl->add_flag("--skip-dead", skip_dead, "Exclude sentences with dead histories");
  ppl->add_option("--out", out_path);

  // next
  auto* next = app.add_subcommand("next", "Next-symbol distribution after a history");
  std::string history_text;
  next->add_option("--bundle", bundle_dir)->required();
  next->add_option("--history", history_text, "Space-separated symbols");
  next->add_flag("--raw", raw_text, "History is untokenized text");
  next->add_option("--out", out_path);

  // rescore
  auto* rescore = app.add_subcommand("rescore", "Shallow-fusion n-best rescoring");
  std::string nbest_path, references_path;
  nfclm::FusionWeights weights;
  rescore->add_option("--bundle", bundle_dir)->required();
  rescore->add_option("--nbest", nbest_path)->required();
  rescore->add_option("--lm-weight", weights.lm)->check(CLI::NonNegativeNumber);
  rescore->add_option("--ilm-weight", weights.ilm)->check(CLI::NonNegativeNumber);
  rescore->add_option("--references", references_path, "utt-id<TAB>symbols");
  rescore->add_option("--out", out_path);

  // sample
  auto* sample = app.add_subcommand("sample", "Ancestral samples from the model");
  int max_length = 50;
  sample->add_option("--bundle", bundle_dir)->required();
  sample->add_option("-n,--num", num_samples)->check(CLI::PositiveNumber);
  sample->add_option("--max-len", max_length)->check(CLI::PositiveNumber);
  sample->add_option("--out", out_path);

  // dump-dynfst
  auto* dump = app.add_subcommand("dump-dynfst", "Expand the dynamic FST along a path and print it");
  std::string symbols_text;
  size_t capacity = 0;
  dump->add_option("--bundle", bundle_dir)->required();
  dump->add_option("--symbols", symbols_text, "Space-separated path symbols")->required();
  dump->add_option("--capacity", capacity, "Resident state limit (0 = unbounded)");
  dump->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build_fst) {
      nfclm::Vocabulary vocab = nfclm::Vocabulary::LoadFile(vocab_path);
      if (class_label.empty()) class_label = std::filesystem::path(entities_path).stem().string();
      nfclm::ClassFst fst = nfclm::ClassFst::Build(
          class_label, nfclm::LoadEntitiesFile(entities_path, vocab));
      nfclm::WriteFileBytes(out_path, fst.Serialize());
      if (!text_dump.empty()) {
        Output o(text_dump);
        fst.WriteText(o.stream(), &vocab);
      }
      std::cerr << class_label << ": " << fst.num_entities() << " entities, "
                << fst.num_states() << " states, " << fst.num_arcs() << " arcs\n";
    } else if (*train_bglm) {
      nfclm::Vocabulary vocab = nfclm::Vocabulary::LoadFile(vocab_path);
      nfclm::BackoffNGram lm = nfclm::TrainBackgroundNGram(
          ReadCorpus(corpus_path, vocab, false), vocab, ngram_options);
      nfclm::WriteFileBytes(out_path, lm.Serialize());
      if (!counts_dump.empty()) {
        Output o(counts_dump);
        lm.WriteCounts(o.stream());
      }
    } else if (*train_decider) {
      nfclm::Vocabulary vocab = nfclm::Vocabulary::LoadFile(vocab_path);
      nfclm::ClassAlphabet classes = nfclm::ClassAlphabet::LoadFile(classes_path);
      classes.CheckDisjoint(vocab);
      auto read_tagged = [&](const std::string& path) {
        std::vector<std::vector<int>> out;
        for (const auto& line : NonEmpty(InputLines(path))) {
          out.push_back(nfclm::ParseTaggedSentence(line, vocab, classes));
        }
        return out;
      };
      auto corpus = read_tagged(corpus_path);
      auto prior_corpus = prior_path.empty() ? corpus : read_tagged(prior_path);
      if (g.alpha_opt->count() > 0) decider_options.alpha = g.alpha;
      nfclm::DeciderModel decider =
          nfclm::TrainDecider(corpus, prior_corpus, vocab, classes, decider_options);
      nfclm::WriteFileBytes(out_path, decider.Serialize());
    } else if (*expand_cfg) {
      nfclm::Vocabulary vocab = nfclm::Vocabulary::LoadFile(vocab_path);
      nfclm::ClassAlphabet classes = nfclm::ClassAlphabet::LoadFile(classes_path);
      nfclm::CfgGrammar grammar =
          nfclm::LoadGrammar(patterns_path, entity_dir, vocab, classes);
      const uint64_t seed = ResolveSeed(g);
      Output o(out_path);
      if (tagged) {
        for (const auto& s : nfclm::ExpandTagged(grammar, vocab, num_samples, seed)) {
          o.stream() << nfclm::FormatTaggedSentence(s, vocab, classes) << '\n';
        }
      } else {
        for (const auto& s : nfclm::Expand(grammar, vocab, num_samples, seed)) {
          o.stream() << vocab.JoinSymbols(s) << '\n';
        }
      }
    } else if (*mix) {
      auto bg = NonEmpty(InputLines(background_lines));
      auto cfg = NonEmpty(InputLines(cfg_lines));
      size_t n = total.value_or(bg.size() + cfg.size());
      Output o(out_path);
      for (const auto& line : nfclm::MixCorpora(bg, cfg, fraction, n, ResolveSeed(g))) {
        o.stream() << line << '\n';
      }
    } else if (*pack) {
      nfclm::Vocabulary vocab = nfclm::Vocabulary::LoadFile(vocab_path);
      nfclm::ClassAlphabet classes = nfclm::ClassAlphabet::LoadFile(classes_path);
      std::shared_ptr<const nfclm::ConditionalSymbolModel> background =
          nfclm::DeserializeSymbolModel(nfclm::ReadFileBytes(background_path));
      nfclm::DeciderModel decider =
          nfclm::DeciderModel::Deserialize(nfclm::ReadFileBytes(decider_path));
      if (g.alpha_opt->count() > 0) decider.set_alpha(g.alpha);
      std::vector<nfclm::ClassFst> fsts;
      for (const auto& p : fst_paths) {
        fsts.push_back(nfclm::ClassFst::Deserialize(nfclm::ReadFileBytes(p)));
      }
      nfclm::NfclmModel model(std::move(vocab), std::move(classes), std::move(background),
                              std::move(fsts), std::move(decider));
      nfclm::BeamOptions beam;
      beam.max_hypotheses = g.beam_n;
      beam.delta = g.beam_delta;
      beam.renormalize = !g.no_renormalize;
      uint64_t sum = 0;
      for (const auto& s : nfclm::PackBundle(model, beam, out_path)) {
        std::cout << s.name << '\t' << s.file << '\t' << s.bytes << '\n';
        sum += s.bytes;
      }
      std::cout << "total\t-\t" << sum << '\n';
    } else if (*score) {
      nfclm::LoadedBundle b = OpenBundle(bundle_dir, g);
      auto corpus = ReadCorpus(corpus_path, b.model.vocab(), raw_text);
      auto scores = nfclm::ScoreCorpus(nfclm::MakeNfclmScorer(b.model, Mode(g), b.beam),
                                       corpus, g.threads);
      Output o(out_path);
      for (size_t i = 0; i < corpus.size(); ++i) {
        if (scores[i].dead) {
          o.stream() << "DEAD\t" << scores[i].dead_position << '\t';
        } else {
          o.stream() << Num(scores[i].log_prob) << '\t' << corpus[i].size() + 1 << '\t';
        }
        o.stream() << b.model.vocab().JoinSymbols(corpus[i]) << '\n';
      }
    } else if (*ppl) {
      nfclm::LoadedBundle b = OpenBundle(bundle_dir, g);
      auto corpus = ReadCorpus(corpus_path, b.model.vocab(), raw_text);
      nfclm::SentenceScorer scorer =
          background_only ? nfclm::MakeBackgroundScorer(b.model.background(), b.model.vocab())
                          : nfclm::MakeNfclmScorer(b.model, Mode(g), b.beam);
      nfclm::PerplexityOptions options;
      options.skip_dead = skip_dead;
      options.threads = g.threads;
      nfclm::PerplexityResult r = nfclm::ComputePerplexity(scorer, corpus, options);
      for (size_t i : r.dead_sentences) {
        std::cerr << "dead history in sentence " << i + 1 << ": "
                  << b.model.vocab().JoinSymbols(corpus[i]) << '\n';
      }
      Output o(out_path);
      o.stream() << "perplexity\t" << Num(r.perplexity) << '\n'
                 << "log_prob\t" << Num(r.total_log_prob) << '\n'
                 << "tokens\t" << r.num_tokens << '\n'
                 << "sentences\t" << r.num_sentences << '\n'
                 << "dead\t" << r.dead_sentences.size() << '\n';
      if (!r.dead_sentences.empty() && !skip_dead) return 3;
    } else if (*next) {
      nfclm::LoadedBundle b = OpenBundle(bundle_dir, g);
      const nfclm::Vocabulary& vocab = b.model.vocab();
      std::vector<int> history =
          raw_text ? vocab.Tokenize(history_text) : vocab.ParseSymbols(history_text);
      std::vector<double> dist;
      if (g.exact) {
        dist = nfclm::ExactNextDistribution(b.model, history);
      } else {
        nfclm::AlignmentBeam beam = nfclm::AlignmentBeam::Initial(b.model, b.beam);
        for (int w : history) {
          nfclm::ExtendResult r = nfclm::Extend(b.model, beam, w);
          if (r.dead) {
            throw Error(ErrorKind::kDeadHistory,
                        "history is impossible at symbol '" + vocab.Symbol(w) + "'");
          }
          beam = std::move(r.beam);
        }
        dist = nfclm::NextDistribution(b.model, beam);
      }
      Output o(out_path);
      for (int w = 0; w < vocab.num_outcomes(); ++w) {
        o.stream() << vocab.Symbol(w) << '\t' << Num(dist[w]) << '\n';
      }
    } else if (*rescore) {
      nfclm::LoadedBundle b = OpenBundle(bundle_dir, g);
      std::ifstream in(nbest_path);
      if (!in) throw Error(ErrorKind::kIo, "cannot open " + nbest_path);
      auto entries = nfclm::ParseNBest(in, b.model.vocab());
      if (entries.empty()) throw Error(ErrorKind::kEmptyInput, "n-best list is empty");
      nfclm::ValidateFusionWeights(weights);
      auto ranked = nfclm::RankNBest(
          nfclm::ScoreNBest(b.model, entries, Mode(g), b.beam, g.threads), weights);
      Output o(out_path);
      std::map<std::string, size_t> position;
      for (const auto& r : ranked) {
        size_t pos = position[r.entry.utterance_id]++;
        o.stream() << r.entry.utterance_id << '\t' << pos << '\t' << r.entry.rank << '\t'
                   << (r.failed ? std::string("FAILED") : Num(r.fused_score)) << '\t'
                   << Num(r.entry.asr_score) << '\t'
                   << (r.failed ? std::string("-") : Num(r.lm_log_prob)) << '\t'
                   << Num(r.entry.ilm_score) << '\t' << r.entry.hypothesis << '\n';
        if (r.failed) {
          std::cerr << "entry " << r.entry.utterance_id << '/' << r.entry.rank << ": "
                    << r.entry.error << '\n';
        }
      }
      if (!references_path.empty()) {
        std::ifstream ref_in(references_path);
        if (!ref_in) throw Error(ErrorKind::kIo, "cannot open " + references_path);
        auto refs = nfclm::ParseReferences(ref_in);
        size_t correct = 0, counted = 0;
        std::map<std::string, bool> seen;
        for (const auto& r : ranked) {
          if (seen[r.entry.utterance_id]) continue;
          seen[r.entry.utterance_id] = true;
          auto it = refs.find(r.entry.utterance_id);
          if (it == refs.end()) continue;
          ++counted;
          std::string hyp;
          for (auto tok : nfclm::SplitWhitespace(r.entry.hypothesis)) {
            if (!hyp.empty()) hyp.push_back(' ');
            hyp += tok;
          }
          if (hyp == it->second) ++correct;
        }
        std::cerr << "top1-correct\t" << correct << '/' << counted << '\n';
      }
    } else if (*sample) {
      nfclm::LoadedBundle b = OpenBundle(bundle_dir, g);
      const uint64_t seed = ResolveSeed(g);
      Output o(out_path);
      for (int i = 0; i < num_samples; ++i) {
        o.stream() << b.model.vocab().JoinSymbols(nfclm::Sample(b.model, max_length, seed + i))
                   << '\n';
      }
    } else if (*dump) {
      nfclm::LoadedBundle b = OpenBundle(bundle_dir, g);
      nfclm::BeamOptions beam = b.beam;
      if (g.exact) {
        beam.max_hypotheses = 1000000;
        beam.delta = std::numeric_limits<double>::infinity();
      }
      nfclm::DynamicFst fst(b.model, beam, capacity);
      std::vector<int> path = b.model.vocab().ParseSymbols(symbols_text);
      nfclm::DynamicFst::StateId state = fst.Start();
      Output o(out_path);
      for (int w : path) {
        auto arc = fst.Transition(state, w);
        if (!arc) {
          o.stream() << "NOARC\t" << state << '\t' << b.model.vocab().Symbol(w) << '\n';
          break;
        }
        state = arc->next;
      }
      fst.Dump(o.stream());
      auto final_weight = fst.FinalWeight(state);
      o.stream() << "FINAL\t" << state << '\t'
                 << (final_weight ? Num(*final_weight) : std::string("none")) << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "nfclm: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "nfclm: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
