// include/tandem/hmm.h
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

#ifndef TANDEM_HMM_H_
#define TANDEM_HMM_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tandem/gmm.h"
#include "tandem/util.h"

namespace tandem {

inline constexpr int kNumHmmStates = 5;      // entry, 3 emitting, exit
inline constexpr int kNumEmittingStates = 3;

/// Left-to-right monophone: non-emitting entry (0) and exit (4) around three
/// self-looping emitting states (1..3). Allowed arcs: 0->1, i->i, i->i+1.
struct PhonemeHmm {
  int phoneme_id = 0;
  std::array<GmmState, kNumEmittingStates> states;
  /// Probabilities, row = source; row 4 (exit) is all zero.
  Eigen::Matrix<double, kNumHmmStates, kNumHmmStates, Eigen::RowMajor> trans =
      Eigen::Matrix<double, kNumHmmStates, kNumHmmStates, Eigen::RowMajor>::Zero();

  /// Transition matrix with the given self-loop probability on all emitting
  /// states.
  static Eigen::Matrix<double, kNumHmmStates, kNumHmmStates, Eigen::RowMajor>
  LeftToRight(double self_loop);
};

/// One model per inventory entry, indexed by phoneme id.
struct HmmSet {
  uint64_t inventory_hash = 0;
  int dim = 0;
  std::vector<PhonemeHmm> models;

  int NumPhonemes() const { return static_cast<int>(models.size()); }
  /// Component count of the first emitting state (uniform across the set
  /// after flat start and splitting).
  int NumMixtures() const;
};

struct HmmOptions {
  double variance_floor = 1e-4;
  double init_self_loop = 0.6;
};

/// Every emitting state of every phoneme gets one Gaussian with the global
/// mean and (floored) variance of all observations; transitions 0.6/0.4.
HmmSet FlatStart(int num_phonemes, int dim, uint64_t inventory_hash,
                 const std::vector<Matrix> &observations,
                 const HmmOptions &opts = {});

/// Splits every state's mixture (see SplitGmm).
HmmSet SplitMixtures(const HmmSet &set);

/// Emitting states of the concatenated models for a transcription, in order,
/// with log transition scores. enter is the log-probability of reaching state
/// 0 from the start; advance[s] is the log-probability of leaving state s
/// forward (into s+1, or out of the final exit for the last state).
struct ChainModel {
  std::vector<int> phoneme;  // per chain state
  std::vector<int> state;    // emitting index 0..2 within the phoneme
  std::vector<double> self_loop;
  std::vector<double> advance;
  double enter = 0.0;

  int Size() const { return static_cast<int>(phoneme.size()); }
};

ChainModel BuildChain(const HmmSet &set, const std::vector<int> &transcription);

/// T x S matrix of per-frame emission log-likelihoods for each chain state.
Matrix ChainEmissions(const HmmSet &set, const ChainModel &chain,
                      const Matrix &obs);

/// log P(obs | concatenated model) by the forward recursion in the log
/// domain, including the final transition out of the last state. Throws when
/// T is shorter than the number of emitting states.
double ForwardLogLik(const HmmSet &set, const std::vector<int> &transcription,
                     const Matrix &obs);

/// Forward and backward tables (T x S, log domain) for a chain.
struct ForwardBackwardTables {
  Matrix alpha;
  Matrix beta;
  double loglik = kLogZero;
};

ForwardBackwardTables ForwardBackward(const ChainModel &chain,
                                      const Matrix &emissions);

/// Sufficient statistics for embedded re-estimation; Merge is associative so
/// per-utterance accumulators can be combined in any grouping.
struct StateAccumulator {
  Vector occupancy;      // per component
  Eigen::MatrixXd sum;   // dim x M
  Eigen::MatrixXd sum_sq;
  double self_loop = 0.0;
  double advance = 0.0;
};

struct HmmAccumulator {
  std::map<int, std::array<StateAccumulator, kNumEmittingStates>> phonemes;
  double total_loglik = 0.0;
  int64_t frames = 0;

  void Merge(const HmmAccumulator &other);
};

/// E-step for one utterance.
HmmAccumulator AccumulateUtterance(const HmmSet &set,
                                   const std::vector<int> &transcription,
                                   const Matrix &obs);

/// M-step: ML means, variances (floored), weights and self-loop/advance
/// probabilities. States with no occupancy keep their parameters.
void UpdateModels(const HmmAccumulator &acc, const HmmOptions &opts,
                  HmmSet *set);

/// Baum-Welch over transcription-concatenated models. Returns the total
/// corpus log-likelihood measured in the E-step of each iteration (i.e. under
/// the parameters entering that iteration).
std::vector<double> TrainEmbedded(HmmSet *set,
                                  const std::vector<Matrix> &observations,
                                  const std::vector<std::vector<int>> &transcriptions,
                                  int iterations, const HmmOptions &opts = {},
                                  int jobs = 1);

struct DecodeConfig {
  double insertion_penalty = 0.0;
};

struct DecodeResult {
  std::vector<int> phonemes;
  /// [start, end) frame range per decoded phoneme; partitions [0, T).
  std::vector<std::pair<int, int>> segments;
  double log_score = kLogZero;
};

/// Exact Viterbi through an unconstrained phone loop: every phoneme may follow
/// every other, each entry scored ln(1/K) + insertion_penalty.
DecodeResult ViterbiDecode(const HmmSet &set, const Matrix &obs,
                           const DecodeConfig &config = {});

/// ln(max(y, 1e-6)) applied elementwise.
Matrix LogTransformObservations(const Matrix &obs);

// Model file (little-endian): "THMM", u32 version (1), u64 inventory hash,
// u32 phoneme count, u32 dim, then per phoneme the 5x5 row-major transition
// matrix and, per emitting state, u32 component count followed by
// (weight, mean[dim], variance[dim]) per component. Reals are float64.
void SaveHmmSet(const std::string &path, const HmmSet &set);
HmmSet LoadHmmSet(const std::string &path);

}  // namespace tandem

#endif  // TANDEM_HMM_H_
