// tests/experiment-test.cc
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <iterator>
#include <sstream>

#include "doctest.h"
#include "tandem/experiment.h"
#include "tandem/hmm.h"
#include "test-util.h"

namespace tandem {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

std::vector<double> ReadTrace(const std::string &path) {
  std::ifstream is(path);
  std::vector<double> v;
  size_t i;
  double x;
  while (is >> i >> x) v.push_back(x);
  return v;
}

ExperimentConfig QuietConfig(const fs::path &dir) {
  ExperimentConfig cfg;
  cfg.out_dir = (dir / "exp").string();
  cfg.verbose = false;
  return cfg;
}

TEST_CASE("feature extraction of a one-second file") {
  const fs::path dir = testing::TempDir("extract");
  Rng rng(1);
  Waveform w;
  for (int i = 0; i < 16000; ++i) w.samples.push_back(rng.Uniform(-0.5, 0.5));
  WriteWav((dir / "one.wav").string(), w);
  std::ofstream(dir / "phones.txt") << "sil\naa\n";
  std::ofstream(dir / "m.tsv") << "one\tone.wav\tsil aa sil\n";

  ExperimentConfig cfg = QuietConfig(dir);
  cfg.train_manifest = cfg.test_manifest = (dir / "m.tsv").string();
  cfg.inventory = (dir / "phones.txt").string();
  REQUIRE(RunExtract(cfg) == 0);
  const std::string lf = FeaturePath(cfg, FrontEnd::kLf25, "test", "one");
  const std::string mf = FeaturePath(cfg, FrontEnd::kMfcc39, "test", "one");
  const Matrix a = ReadTpf(lf), b = ReadTpf(mf);
  CHECK(a.rows() == 98);
  CHECK(a.cols() == 25);
  CHECK(b.rows() == 98);
  CHECK(b.cols() == 39);

  const std::string first = Slurp(lf);
  cfg.jobs = 2;
  REQUIRE(RunExtract(cfg) == 0);
  CHECK(Slurp(lf) == first);
}

TEST_CASE("small pipeline end to end") {
  const fs::path dir = testing::TempDir("pipeline");
  SynthConfig sc;
  sc.out_dir = (dir / "corpus").string();
  sc.num_phonemes = 3;
  sc.num_train = 12;
  sc.num_test = 4;
  sc.seed = 5;
  const SynthOutputs corpus = RunSynth(sc);

  // A three-frame test utterance: the shortest a phone loop can decode.
  Waveform tiny;
  tiny.samples.assign(720, 0.0);
  WriteWav((dir / "corpus" / "tiny.wav").string(), tiny);
  std::ofstream(corpus.test_manifest, std::ios::app) << "tiny\ttiny.wav\tsil\n";

  ExperimentConfig cfg = QuietConfig(dir);
  cfg.train_manifest = corpus.train_manifest;
  cfg.test_manifest = corpus.test_manifest;
  cfg.inventory = corpus.inventory;
  cfg.mln_hidden = {16, 8};
  cfg.mln.epochs = 3;
  cfg.mixtures = {1, 2};
  cfg.em_iterations = 3;

  CHECK_THROWS_AS(RunTrainMln(cfg), TandemError);  // no features yet
  REQUIRE(RunExtract(cfg) == 0);
  REQUIRE(RunTrainMln(cfg) == 0);
  REQUIRE(RunPosteriors(cfg) == 0);
  for (FrontEnd fe : cfg.front_ends) {
    const Matrix feats = ReadTpf(FeaturePath(cfg, fe, "train", "train0003"));
    const Matrix post = ReadTpf(PosteriorPath(cfg, fe, "train", "train0003"));
    CHECK(post.rows() == feats.rows());
    CHECK(post.cols() == 4);
  }
  REQUIRE(RunTrainHmm(cfg) == 0);
  for (FrontEnd fe : cfg.front_ends)
    for (int m : {1, 2}) {
      CHECK(LoadHmmSet(HmmPath(cfg, fe, m)).NumMixtures() == m);
      const auto trace = ReadTrace(
          fs::path(HmmPath(cfg, fe, m)).replace_extension(".trace.txt").string());
      REQUIRE(trace.size() == 3);
      for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-8);
    }
  REQUIRE(RunDecode(cfg) == 0);
  std::ifstream dec(DecodePath(cfg, FrontEnd::kLf25, "test", 1));
  std::string line, tiny_line;
  int lines = 0;
  while (std::getline(dec, line)) {
    ++lines;
    if (line.rfind("tiny\t", 0) == 0) tiny_line = line;
  }
  CHECK(lines == 5);
  const auto fields = SplitWhitespace(tiny_line);
  REQUIRE(fields.size() == 4);  // id, one symbol, one segment, score
  CHECK(fields[2] == "0-3");

  ResultTable table;
  REQUIRE(RunScore(cfg, &table) == 0);
  CHECK(table.rows.size() == 8);
  CHECK(table.missing.empty());
  const auto csv = ReadResultCsv((fs::path(cfg.out_dir) / "results.csv").string());
  CHECK(csv.size() == 8);
}

// Writes reference transcriptions as decoder output for every cell.
void FabricateDecodes(const ExperimentConfig &cfg, const PhonemeInventory &inv) {
  for (FrontEnd fe : cfg.front_ends)
    for (int m : cfg.mixtures)
      for (const char *split : {"train", "test"}) {
        const auto recs = LoadManifest(split == std::string("train") ? cfg.train_manifest
                                                                     : cfg.test_manifest,
                                       inv);
        fs::create_directories(fs::path(DecodePath(cfg, fe, split, m)).parent_path());
        std::ofstream os(DecodePath(cfg, fe, split, m));
        for (const auto &r : recs) {
          os << r.id << '\t';
          for (size_t i = 0; i < r.transcription.size(); ++i)
            os << (i ? " " : "") << inv.Symbol(r.transcription[i]);
          os << "\t0-1\t0.0\n";
        }
      }
}

TEST_CASE("scoring a full grid") {
  const fs::path dir = testing::TempDir("grid");
  SynthConfig sc;
  sc.out_dir = (dir / "corpus").string();
  sc.num_train = 3;
  sc.num_test = 2;
  const SynthOutputs corpus = RunSynth(sc);
  const PhonemeInventory inv = LoadInventory(corpus.inventory);
  CHECK(inv.Symbols() == std::vector<std::string>{"sil", "aa", "m", "r", "ax", "ch"});

  ExperimentConfig cfg = QuietConfig(dir);
  cfg.train_manifest = corpus.train_manifest;
  cfg.test_manifest = corpus.test_manifest;
  cfg.inventory = corpus.inventory;
  FabricateDecodes(cfg, inv);

  ResultTable table;
  CHECK(RunScore(cfg, &table) == 0);
  REQUIRE(table.rows.size() == 20);
  for (const auto &row : table.rows) {
    CHECK(row.pcr == 100.0);
    CHECK(row.acc == 100.0);
  }
  const std::string csv_path = (fs::path(cfg.out_dir) / "results.csv").string();
  const std::string csv = Slurp(csv_path);
  CHECK(csv.rfind("front_end,mixtures,dataset,pcr,acc\n", 0) == 0);
  CHECK(csv.find("mfcc39,1,train,100.00,100.00\n") != std::string::npos);
  CHECK(csv.find('\r') == std::string::npos);
  const auto back = ReadResultCsv(csv_path);
  REQUIRE(back.size() == 20);
  for (size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].front_end == table.rows[i].front_end);
    CHECK(back[i].mixtures == table.rows[i].mixtures);
    CHECK(back[i].dataset == table.rows[i].dataset);
    CHECK(back[i].pcr == 100.0);
  }

  // A missing cell is reported and counts as a failure; the rest is scored.
  fs::remove(DecodePath(cfg, FrontEnd::kLf25, "test", 8));
  CHECK(RunScore(cfg, &table) == 1);
  CHECK(table.rows.size() == 19);
  REQUIRE(table.missing.size() == 1);
  CHECK(table.missing[0] == "lf25/mix8/test");
}

TEST_CASE("configuration validation") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.Validate());
  cfg.mixtures = {1, 3};
  CHECK_THROWS_AS(cfg.Validate(), TandemError);
  cfg.mixtures = {4, 2};
  CHECK_THROWS_AS(cfg.Validate(), TandemError);
  cfg.mixtures = {32};
  CHECK_THROWS_AS(cfg.Validate(), TandemError);
  cfg.mixtures = {2, 8};
  CHECK_NOTHROW(cfg.Validate());
  cfg.front_ends.clear();
  CHECK_THROWS_AS(cfg.Validate(), TandemError);
  cfg = {};
  cfg.jobs = 0;
  CHECK_THROWS_AS(cfg.Validate(), TandemError);
  cfg = {};
  cfg.em_iterations = 0;
  CHECK_THROWS_AS(cfg.Validate(), TandemError);

  CHECK(ParseFrontEnd("lf25") == FrontEnd::kLf25);
  CHECK(ParseFrontEnd("mfcc39") == FrontEnd::kMfcc39);
  CHECK_THROWS_AS(ParseFrontEnd("plp"), TandemError);
  CHECK(FeatureDim(FrontEnd::kLf25) == 25);
  CHECK(FeatureDim(FrontEnd::kMfcc39) == 39);
}

TEST_CASE("missing artifacts stop a stage") {
  const fs::path dir = testing::TempDir("missing");
  SynthConfig sc;
  sc.out_dir = (dir / "corpus").string();
  sc.num_train = 2;
  sc.num_test = 1;
  const SynthOutputs corpus = RunSynth(sc);
  ExperimentConfig cfg = QuietConfig(dir);
  cfg.train_manifest = corpus.train_manifest;
  cfg.test_manifest = corpus.test_manifest;
  cfg.inventory = corpus.inventory;
  CHECK_THROWS_WITH_AS(RunPosteriors(cfg), doctest::Contains("train-mln"), TandemError);
  CHECK_THROWS_WITH_AS(RunDecode(cfg), doctest::Contains("train-hmm"), TandemError);
}

}  // namespace
}  // namespace tandem
