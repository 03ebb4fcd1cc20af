// include/tandem/corpus.h
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

#ifndef TANDEM_CORPUS_H_
#define TANDEM_CORPUS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tandem/audio-io.h"
#include "tandem/util.h"

namespace tandem {

/// Ordered phoneme symbol set; ids are positions in the list.
class PhonemeInventory {
 public:
  PhonemeInventory() = default;
  /// Throws TandemError naming the first duplicate symbol.
  explicit PhonemeInventory(std::vector<std::string> symbols);

  int Size() const { return static_cast<int>(symbols_.size()); }
  const std::vector<std::string> &Symbols() const { return symbols_; }
  const std::string &Symbol(int id) const { return symbols_.at(id); }
  std::optional<int> Find(const std::string &symbol) const;
  /// Throws when the symbol is not in the inventory.
  int Id(const std::string &symbol) const;
  /// FNV-1a over the newline-joined symbol list; stamped into model files.
  uint64_t Hash() const;

  bool operator==(const PhonemeInventory &other) const {
    return symbols_ == other.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

/// One symbol per line; blank lines and lines starting with '#' are skipped.
PhonemeInventory LoadInventory(const std::string &path);
void SaveInventory(const std::string &path, const PhonemeInventory &inv);

/// Path of the shipped 53-symbol inventory (51 phonemes + sil + sp).
std::string DefaultInventoryPath();

struct UtteranceRecord {
  std::string id;
  std::string audio_path;
  std::vector<int> transcription;
  std::optional<std::vector<int>> frame_labels;
};

/// Line format: id \t audio_path \t transcription [\t frame labels], symbols
/// space-separated. Relative audio paths resolve against the manifest's
/// directory. Every audio file must exist, and explicit frame labels must
/// match the frame count of the audio.
std::vector<UtteranceRecord> LoadManifest(const std::string &path,
                                          const PhonemeInventory &inv);
void SaveManifest(const std::string &path,
                  const std::vector<UtteranceRecord> &records,
                  const PhonemeInventory &inv);

/// Splits total_frames into contiguous blocks, one per phoneme, whose sizes
/// differ by at most one; earlier phonemes take the extra frames.
std::vector<int> UniformSegmentLabels(const std::vector<int> &transcription,
                                      int total_frames);

struct SyntheticPhonemeProfile {
  int phoneme_id = 0;
  std::array<double, kNumMelBands> band_energies{};
  double noise_level = 0.0;
};

struct UtteranceSpec {
  std::vector<int> phonemes;
  std::vector<int> durations;  // frames per phoneme
};

struct SyntheticUtterance {
  Waveform wave;
  UtteranceRecord record;  // audio_path left empty
};

/// Renders each spec as a sum of sinusoids at the mel-band center
/// frequencies, amplitude sqrt(band energy), plus Gaussian noise. Frame t
/// carries the phoneme whose block contains t; the waveform has
/// (T-1)*160 + 400 samples. Utterance i uses DeriveSeed(seed, i), so the
/// output is a pure function of the arguments.
std::vector<SyntheticUtterance> GenerateSyntheticCorpus(
    const std::vector<SyntheticPhonemeProfile> &profiles,
    const std::vector<UtteranceSpec> &specs, uint64_t seed);

/// A fixed profile per inventory entry: "sil" and "sp" are low-level noise,
/// every other phoneme excites three bands chosen from its index.
std::vector<SyntheticPhonemeProfile> DefaultSyntheticProfiles(
    const PhonemeInventory &inv);

struct SyntheticSpecOptions {
  int min_phonemes = 3;
  int max_phonemes = 6;
  int min_duration = 6;
  int max_duration = 14;
  int min_silence = 8;
  int max_silence = 16;
};

/// Random utterances: sil, a run of non-silence phonemes without immediate
/// repeats, sil. Silence padding is omitted if the inventory has no "sil".
std::vector<UtteranceSpec> RandomUtteranceSpecs(
    int count, const PhonemeInventory &inv, uint64_t seed,
    const SyntheticSpecOptions &opts = {});

}  // namespace tandem

#endif  // TANDEM_CORPUS_H_
