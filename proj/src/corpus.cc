// src/corpus.cc
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

#include "tandem/corpus.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "tandem/spectral.h"

namespace tandem {

namespace fs = std::filesystem;

PhonemeInventory::PhonemeInventory(std::vector<std::string> symbols)
    : symbols_(std::move(symbols)) {
  for (int i = 0; i < Size(); ++i) {
    if (!index_.emplace(symbols_[i], i).second)
      throw TandemError("duplicate phoneme symbol '" + symbols_[i] + "'");
  }
}

std::optional<int> PhonemeInventory::Find(const std::string &symbol) const {
  auto it = index_.find(symbol);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int PhonemeInventory::Id(const std::string &symbol) const {
  auto id = Find(symbol);
  if (!id) throw TandemError("unknown phoneme symbol '" + symbol + "'");
  return *id;
}

uint64_t PhonemeInventory::Hash() const {
  std::string joined;
  for (const auto &s : symbols_) {
    joined += s;
    joined += '\n';
  }
  return Fnv1a64(joined);
}

PhonemeInventory LoadInventory(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw TandemError("cannot open inventory file " + path);
  std::vector<std::string> symbols;
  std::string line;
  while (std::getline(is, line)) {
    std::string s = Trim(line);
    if (s.empty() || s[0] == '#') continue;
    symbols.push_back(std::move(s));
  }
  if (symbols.empty()) throw TandemError("inventory file " + path + " is empty");
  try {
    return PhonemeInventory(std::move(symbols));
  } catch (const TandemError &e) {
    throw TandemError(path + ": " + e.what());
  }
}

void SaveInventory(const std::string &path, const PhonemeInventory &inv) {
  std::ofstream os(path);
  if (!os) throw TandemError("cannot write " + path);
  for (const auto &s : inv.Symbols()) os << s << '\n';
}

std::string DefaultInventoryPath() {
  return std::string(TANDEM_DATA_DIR) + "/phones53.txt";
}

namespace {

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, '\t')) fields.push_back(f);
  return fields;
}

}  // namespace

std::vector<UtteranceRecord> LoadManifest(const std::string &path,
                                          const PhonemeInventory &inv) {
  std::ifstream is(path);
  if (!is) throw TandemError("cannot open manifest " + path);
  const fs::path base = fs::path(path).parent_path();
  std::vector<UtteranceRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    const std::string where = path + ":" + std::to_string(line_no);
    const auto fields = SplitTabs(line);
    if (fields.size() < 3 || fields.size() > 4)
      throw TandemError(where + ": malformed line, expected 3 or 4 tab-separated fields");
    UtteranceRecord rec;
    rec.id = Trim(fields[0]);
    if (rec.id.empty()) throw TandemError(where + ": malformed line, empty id");
    fs::path audio = Trim(fields[1]);
    if (audio.empty()) throw TandemError(where + ": malformed line, empty audio path");
    if (audio.is_relative()) audio = base / audio;
    rec.audio_path = audio.string();

    auto to_ids = [&](const std::string &text) {
      std::vector<int> ids;
      for (const auto &sym : SplitWhitespace(text)) {
        auto id = inv.Find(sym);
        if (!id)
          throw TandemError(where + ": utterance '" + rec.id +
                            "' has unknown phoneme symbol '" + sym + "'");
        ids.push_back(*id);
      }
      return ids;
    };
    rec.transcription = to_ids(fields[2]);
    if (rec.transcription.empty())
      throw TandemError(where + ": malformed line, empty transcription");
    if (fields.size() == 4) rec.frame_labels = to_ids(fields[3]);

    if (!fs::exists(rec.audio_path))
      throw TandemError(where + ": audio file not found: " + rec.audio_path);
    if (rec.frame_labels) {
      const int expected = NumFrames(ReadWavInfo(rec.audio_path).num_samples);
      if (static_cast<int>(rec.frame_labels->size()) != expected)
        throw TandemError(where + ": utterance '" + rec.id + "' has " +
                          std::to_string(rec.frame_labels->size()) +
                          " frame labels but the audio has " +
                          std::to_string(expected) + " frames");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void SaveManifest(const std::string &path,
                  const std::vector<UtteranceRecord> &records,
                  const PhonemeInventory &inv) {
  std::ofstream os(path);
  if (!os) throw TandemError("cannot write " + path);
  auto join = [&](const std::vector<int> &ids) {
    std::string s;
    for (size_t i = 0; i < ids.size(); ++i) {
      if (i) s += ' ';
      s += inv.Symbol(ids[i]);
    }
    return s;
  };
  for (const auto &r : records) {
    os << r.id << '\t' << r.audio_path << '\t' << join(r.transcription);
    if (r.frame_labels) os << '\t' << join(*r.frame_labels);
    os << '\n';
  }
}

std::vector<int> UniformSegmentLabels(const std::vector<int> &transcription,
                                      int total_frames) {
  const int n = static_cast<int>(transcription.size());
  if (n == 0) throw TandemError("UniformSegmentLabels: empty transcription");
  if (total_frames < n)
    throw TandemError("UniformSegmentLabels: " + std::to_string(total_frames) +
                      " frames for " + std::to_string(n) + " phonemes");
  const int base = total_frames / n, extra = total_frames % n;
  std::vector<int> labels;
  labels.reserve(total_frames);
  for (int i = 0; i < n; ++i) {
    const int len = base + (i < extra ? 1 : 0);
    labels.insert(labels.end(), len, transcription[i]);
  }
  return labels;
}

namespace {

constexpr double kSynthGain = 0.05;

}  // namespace

std::vector<SyntheticUtterance> GenerateSyntheticCorpus(
    const std::vector<SyntheticPhonemeProfile> &profiles,
    const std::vector<UtteranceSpec> &specs, uint64_t seed) {
  std::unordered_map<int, const SyntheticPhonemeProfile *> by_id;
  for (const auto &p : profiles) {
    bool any_positive = false;
    for (double e : p.band_energies) {
      if (e < 0.0) throw TandemError("negative band energy in profile");
      any_positive |= e > 0.0;
    }
    if (!any_positive)
      throw TandemError("profile for phoneme " + std::to_string(p.phoneme_id) +
                        " has no positive band energy");
    by_id[p.phoneme_id] = &p;
  }
  const std::vector<double> &centers = DefaultFilterbank().center_hz;

  std::vector<SyntheticUtterance> out;
  out.reserve(specs.size());
  for (size_t u = 0; u < specs.size(); ++u) {
    const UtteranceSpec &spec = specs[u];
    if (spec.phonemes.empty() || spec.phonemes.size() != spec.durations.size())
      throw TandemError("utterance spec " + std::to_string(u) +
                        ": phoneme/duration lists empty or mismatched");
    std::vector<int> labels;
    for (size_t i = 0; i < spec.phonemes.size(); ++i) {
      if (spec.durations[i] < 1)
        throw TandemError("utterance spec " + std::to_string(u) +
                          ": duration must be >= 1 frame");
      if (!by_id.count(spec.phonemes[i]))
        throw TandemError("utterance spec " + std::to_string(u) +
                          ": no profile for phoneme id " +
                          std::to_string(spec.phonemes[i]));
      labels.insert(labels.end(), spec.durations[i], spec.phonemes[i]);
    }
    const int num_frames = static_cast<int>(labels.size());
    const int64_t num_samples =
        static_cast<int64_t>(num_frames - 1) * kFrameShift + kFrameLength;

    Rng rng(DeriveSeed(seed, u));
    std::array<double, kNumMelBands> phase;
    for (double &p : phase) p = rng.Uniform(0.0, 2.0 * std::numbers::pi);

    SyntheticUtterance su;
    su.wave.sample_rate = kSampleRate;
    su.wave.samples.resize(num_samples);
    for (int64_t n = 0; n < num_samples; ++n) {
      // Sample n belongs to the frame whose center (160 t + 200) is nearest.
      int64_t t = (n - 120) >= 0 ? (n - 120) / kFrameShift : 0;
      if (t >= num_frames) t = num_frames - 1;
      const SyntheticPhonemeProfile &prof = *by_id.at(labels[t]);
      double s = 0.0;
      for (int j = 0; j < kNumMelBands; ++j) {
        const double e = prof.band_energies[j];
        if (e <= 0.0) continue;
        s += std::sqrt(e) *
             std::sin(2.0 * std::numbers::pi * centers[j] * n / kSampleRate +
                      phase[j]);
      }
      su.wave.samples[n] = kSynthGain * s + prof.noise_level * rng.Gaussian();
    }
    su.record.id = "synth" + std::to_string(u);
    su.record.transcription = spec.phonemes;
    su.record.frame_labels = std::move(labels);
    out.push_back(std::move(su));
  }
  return out;
}

std::vector<SyntheticPhonemeProfile> DefaultSyntheticProfiles(
    const PhonemeInventory &inv) {
  std::vector<SyntheticPhonemeProfile> profiles;
  int k = 0;  // index among non-silence phonemes
  for (int id = 0; id < inv.Size(); ++id) {
    SyntheticPhonemeProfile p;
    p.phoneme_id = id;
    const std::string &sym = inv.Symbol(id);
    if (sym == "sil" || sym == "sp") {
      p.band_energies.fill(1e-4);
      p.noise_level = 0.002;
    } else {
      p.band_energies.fill(1e-3);
      const int shift = 3 * k + k / 8;
      const double levels[3] = {1.0, 0.6, 0.3};
      for (int f = 0; f < 3; ++f)
        p.band_energies[(shift + 8 * f) % kNumMelBands] = levels[(f + k) % 3];
      p.noise_level = 0.002;
      ++k;
    }
    profiles.push_back(p);
  }
  return profiles;
}

std::vector<UtteranceSpec> RandomUtteranceSpecs(
    int count, const PhonemeInventory &inv, uint64_t seed,
    const SyntheticSpecOptions &opts) {
  const std::optional<int> sil = inv.Find("sil");
  std::vector<int> speech;
  for (int id = 0; id < inv.Size(); ++id) {
    const std::string &sym = inv.Symbol(id);
    if (sym != "sil" && sym != "sp") speech.push_back(id);
  }
  if (speech.empty()) throw TandemError("inventory has no speech phonemes");
  auto between = [](Rng &rng, int lo, int hi) {
    return lo + static_cast<int>(rng.Below(static_cast<uint64_t>(hi - lo + 1)));
  };

  std::vector<UtteranceSpec> specs(count);
  for (int u = 0; u < count; ++u) {
    Rng rng(DeriveSeed(seed ^ 0x5eedULL, u));
    UtteranceSpec &spec = specs[u];
    if (sil) {
      spec.phonemes.push_back(*sil);
      spec.durations.push_back(between(rng, opts.min_silence, opts.max_silence));
    }
    const int n = between(rng, opts.min_phonemes, opts.max_phonemes);
    int prev = -1;
    for (int i = 0; i < n; ++i) {
      int ph;
      do {
        ph = speech[rng.Below(speech.size())];
      } while (ph == prev && speech.size() > 1);
      prev = ph;
      spec.phonemes.push_back(ph);
      spec.durations.push_back(between(rng, opts.min_duration, opts.max_duration));
    }
    if (sil) {
      spec.phonemes.push_back(*sil);
      spec.durations.push_back(between(rng, opts.min_silence, opts.max_silence));
    }
  }
  return specs;
}

}  // namespace tandem
