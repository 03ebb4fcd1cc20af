// tests/corpus-test.cc
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

#include "doctest.h"
#include "tandem/corpus.h"
#include "test-util.h"

namespace tandem {
namespace {

namespace fs = std::filesystem;

void WriteText(const fs::path &path, const std::string &text) {
  std::ofstream(path) << text;
}

void WriteSilence(const fs::path &path, int samples) {
  Waveform w;
  w.samples.assign(samples, 0.0);
  WriteWav(path.string(), w);
}

TEST_CASE("shipped inventory") {
  const PhonemeInventory inv = LoadInventory(DefaultInventoryPath());
  CHECK(inv.Size() == 53);
  CHECK(inv.Find("sil").has_value());
  CHECK(inv.Find("sp").has_value());
  CHECK_FALSE(inv.Find("zz").has_value());
  for (int i = 0; i < inv.Size(); ++i) CHECK(inv.Id(inv.Symbol(i)) == i);
}

TEST_CASE("inventory construction and files") {
  CHECK_THROWS_WITH_AS(PhonemeInventory({"a", "b", "a"}),
                       doctest::Contains("duplicate phoneme symbol 'a'"), TandemError);
  const fs::path dir = testing::TempDir("inventory");
  WriteText(dir / "p.txt", "# test\naa\n\nm\nr\nax\n");
  const PhonemeInventory inv = LoadInventory((dir / "p.txt").string());
  REQUIRE(inv.Size() == 4);
  CHECK(inv.Id("aa") == 0);
  CHECK(inv.Id("m") == 1);
  CHECK(inv.Id("r") == 2);
  CHECK(inv.Id("ax") == 3);
  CHECK_THROWS_AS(inv.Id("zz"), TandemError);

  SaveInventory((dir / "q.txt").string(), inv);
  const PhonemeInventory back = LoadInventory((dir / "q.txt").string());
  CHECK(back == inv);
  CHECK(back.Hash() == inv.Hash());
  CHECK(PhonemeInventory({"aa", "m"}).Hash() != PhonemeInventory({"m", "aa"}).Hash());

  WriteText(dir / "empty.txt", "# nothing\n\n");
  CHECK_THROWS_AS(LoadInventory((dir / "empty.txt").string()), TandemError);
  CHECK_THROWS_AS(LoadInventory((dir / "absent.txt").string()), TandemError);
}

TEST_CASE("manifests") {
  const fs::path dir = testing::TempDir("manifest");
  const PhonemeInventory inv({"sil", "a", "b"});
  fs::create_directories(dir / "wav");
  WriteSilence(dir / "wav" / "u1.wav", 16000);  // 98 frames
  WriteSilence(dir / "wav" / "u2.wav", 400);    // 1 frame

  SUBCASE("happy path") {
    WriteText(dir / "m.tsv", "u1\twav/u1.wav\tsil a b sil\nu2\twav/u2.wav\ta\ta\n");
    const auto recs = LoadManifest((dir / "m.tsv").string(), inv);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].id == "u1");
    CHECK(fs::path(recs[0].audio_path) == dir / "wav" / "u1.wav");
    CHECK(recs[0].transcription == std::vector<int>{0, 1, 2, 0});
    CHECK_FALSE(recs[0].frame_labels.has_value());
    REQUIRE(recs[1].frame_labels.has_value());
    CHECK(*recs[1].frame_labels == std::vector<int>{1});

    SaveManifest((dir / "n.tsv").string(), recs, inv);
    const auto again = LoadManifest((dir / "n.tsv").string(), inv);
    REQUIRE(again.size() == 2);
    CHECK(again[0].transcription == recs[0].transcription);
    CHECK(again[1].frame_labels == recs[1].frame_labels);
  }
  SUBCASE("empty manifest") {
    WriteText(dir / "m.tsv", "");
    CHECK(LoadManifest((dir / "m.tsv").string(), inv).empty());
  }
  SUBCASE("unknown symbol") {
    WriteText(dir / "m.tsv", "u1\twav/u1.wav\tsil zz sil\n");
    CHECK_THROWS_WITH_AS(LoadManifest((dir / "m.tsv").string(), inv),
                         doctest::Contains("zz"), TandemError);
    CHECK_THROWS_WITH_AS(LoadManifest((dir / "m.tsv").string(), inv),
                         doctest::Contains("u1"), TandemError);
  }
  SUBCASE("missing audio") {
    WriteText(dir / "m.tsv", "u9\twav/u9.wav\ta\n");
    CHECK_THROWS_AS(LoadManifest((dir / "m.tsv").string(), inv), TandemError);
  }
  SUBCASE("malformed line") {
    WriteText(dir / "m.tsv", "u1\twav/u1.wav\ta\nbroken line\n");
    CHECK_THROWS_WITH_AS(LoadManifest((dir / "m.tsv").string(), inv),
                         doctest::Contains("2"), TandemError);
  }
  SUBCASE("frame label count mismatch") {
    WriteText(dir / "m.tsv", "u2\twav/u2.wav\ta\ta a\n");
    CHECK_THROWS_AS(LoadManifest((dir / "m.tsv").string(), inv), TandemError);
  }
}

TEST_CASE("uniform segmentation") {
  CHECK(UniformSegmentLabels({4, 7}, 5) == std::vector<int>{4, 4, 4, 7, 7});
  CHECK(UniformSegmentLabels({1, 2, 3}, 6) == std::vector<int>{1, 1, 2, 2, 3, 3});
  CHECK(UniformSegmentLabels({9}, 3) == std::vector<int>{9, 9, 9});
  CHECK_THROWS_AS(UniformSegmentLabels({1, 2, 3}, 2), TandemError);
  CHECK_THROWS_AS(UniformSegmentLabels({}, 4), TandemError);
}

TEST_CASE("synthetic utterances") {
  const PhonemeInventory inv({"sil", "a", "b"});
  const auto profiles = DefaultSyntheticProfiles(inv);
  REQUIRE(profiles.size() == 3);
  const UtteranceSpec spec{{1, 2, 1}, {20, 20, 20}};
  const auto corpus = GenerateSyntheticCorpus(profiles, {spec}, 11);
  REQUIRE(corpus.size() == 1);
  const auto &u = corpus[0];
  CHECK(u.wave.samples.size() == 9840);
  CHECK(NumFrames(static_cast<int64_t>(u.wave.samples.size())) == 60);
  REQUIRE(u.record.frame_labels.has_value());
  REQUIRE(u.record.frame_labels->size() == 60);
  for (int t = 0; t < 60; ++t) CHECK((*u.record.frame_labels)[t] == (t / 20 == 1 ? 2 : 1));
  CHECK(u.record.transcription == std::vector<int>{1, 2, 1});
  for (double s : u.wave.samples) CHECK(std::abs(s) <= 1.0);

  const auto again = GenerateSyntheticCorpus(profiles, {spec}, 11);
  CHECK(again[0].wave.samples == u.wave.samples);
  const auto other = GenerateSyntheticCorpus(profiles, {spec}, 12);
  CHECK(other[0].wave.samples != u.wave.samples);

  CHECK_THROWS_AS(GenerateSyntheticCorpus(profiles, {UtteranceSpec{{1}, {0}}}, 1),
                  TandemError);
  CHECK_THROWS_AS(GenerateSyntheticCorpus(profiles, {UtteranceSpec{{7}, {5}}}, 1),
                  TandemError);
}

TEST_CASE("random utterance specs") {
  const PhonemeInventory inv({"sil", "a", "b", "c"});
  const auto specs = RandomUtteranceSpecs(50, inv, 3);
  REQUIRE(specs.size() == 50);
  for (const auto &s : specs) {
    REQUIRE(s.phonemes.size() == s.durations.size());
    REQUIRE(s.phonemes.size() >= 5);
    REQUIRE(s.phonemes.size() <= 8);
    CHECK(s.phonemes.front() == 0);
    CHECK(s.phonemes.back() == 0);
    for (size_t i = 1; i + 1 < s.phonemes.size(); ++i) {
      CHECK(s.phonemes[i] != 0);
      if (i > 1) CHECK(s.phonemes[i] != s.phonemes[i - 1]);
      CHECK(s.durations[i] >= 6);
      CHECK(s.durations[i] <= 14);
    }
  }
  const auto again = RandomUtteranceSpecs(50, inv, 3);
  for (size_t i = 0; i < specs.size(); ++i) CHECK(again[i].phonemes == specs[i].phonemes);
}

}  // namespace
}  // namespace tandem
