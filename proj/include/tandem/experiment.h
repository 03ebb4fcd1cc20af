// include/tandem/experiment.h
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

#ifndef TANDEM_EXPERIMENT_H_
#define TANDEM_EXPERIMENT_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tandem/corpus.h"
#include "tandem/feature-io.h"
#include "tandem/mln.h"

namespace tandem {

// Pipeline stages exchange artifacts on disk under out_dir:
//
//   <fe>/features/<split>/<id>.tpf     acoustic features (T x 39 or T x 25)
//   <fe>/mln.bin, <fe>/mln-loss.txt    network checkpoint and loss trace
//   <fe>/posteriors/<split>/<id>.tpf   MLN outputs (T x K)
//   <fe>/hmm/mix<M>.bin, .trace.txt    HMM set per mixture rung + EM trace
//   <fe>/decode/<split>.mix<M>.txt     id \t phonemes \t segments \t score
//   results.csv, confusion.csv         score tables
//
// where <fe> is mfcc39 or lf25 and <split> is train or test.

struct ExperimentConfig {
  std::string train_manifest;
  std::string test_manifest;
  std::string inventory;
  std::vector<FrontEnd> front_ends = {FrontEnd::kMfcc39, FrontEnd::kLf25};
  std::string out_dir = "exp";
  int jobs = 1;
  bool verbose = true;

  double preemphasis = 0.97;
  int delta_window = 2;

  std::vector<int> mln_hidden = {400, 200, 100};
  MlnTrainConfig mln;

  std::vector<int> mixtures = {1, 2, 4, 8, 16};
  int em_iterations = 5;
  double variance_floor = 1e-4;
  double insertion_penalty = 0.0;
  bool log_posteriors = false;

  /// Throws TandemError on a ladder outside {1,2,4,8,16} or not ascending,
  /// an empty front-end list, or non-positive counts.
  void Validate() const;
};

struct ResultRow {
  FrontEnd front_end = FrontEnd::kMfcc39;
  int mixtures = 1;
  std::string dataset;  // "train" or "test"
  double pcr = 0.0;
  double acc = 0.0;
  /// (reference id, hypothesis id) -> count; -1 marks a gap.
  std::map<std::pair<int, int>, int> confusion;
};

struct ResultTable {
  std::vector<ResultRow> rows;
  /// Requested cells whose decodes were missing, as "fe/mixM/dataset".
  std::vector<std::string> missing;
};

/// Header `front_end,mixtures,dataset,pcr,acc`, percentages with two
/// decimals, LF line endings.
void WriteResultCsv(const std::string &path, const ResultTable &table);
/// Parses a results CSV (confusion counts are not stored there).
std::vector<ResultRow> ReadResultCsv(const std::string &path);

// Each stage returns the number of failed items (0 = success). Problems that
// stop a whole stage, such as a missing prior artifact, throw TandemError.
int RunExtract(const ExperimentConfig &cfg);
int RunTrainMln(const ExperimentConfig &cfg);
int RunPosteriors(const ExperimentConfig &cfg);
int RunTrainHmm(const ExperimentConfig &cfg);
int RunDecode(const ExperimentConfig &cfg);
/// Writes results.csv and confusion.csv; missing cells count as failures.
int RunScore(const ExperimentConfig &cfg, ResultTable *table = nullptr);
/// extract, train-mln, posteriors, train-hmm, decode, score.
int RunAll(const ExperimentConfig &cfg, ResultTable *table = nullptr);

struct SynthConfig {
  std::string out_dir = "synth";
  /// Empty: "sil" plus the first num_phonemes of a built-in symbol list.
  std::string inventory;
  int num_phonemes = 5;
  int num_train = 200;
  int num_test = 50;
  uint64_t seed = 1;
};

struct SynthOutputs {
  std::string inventory;
  std::string train_manifest;
  std::string test_manifest;
};

/// Writes an inventory, WAV files and train/test manifests with frame
/// labels.
SynthOutputs RunSynth(const SynthConfig &cfg);

/// Artifact path helpers.
std::string FeaturePath(const ExperimentConfig &cfg, FrontEnd fe,
                        const std::string &split, const std::string &id);
std::string PosteriorPath(const ExperimentConfig &cfg, FrontEnd fe,
                          const std::string &split, const std::string &id);
std::string MlnPath(const ExperimentConfig &cfg, FrontEnd fe);
std::string HmmPath(const ExperimentConfig &cfg, FrontEnd fe, int mixtures);
std::string DecodePath(const ExperimentConfig &cfg, FrontEnd fe,
                       const std::string &split, int mixtures);

}  // namespace tandem

#endif  // TANDEM_EXPERIMENT_H_
