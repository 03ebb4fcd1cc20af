// src/hmm-decode.cc
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

#include <algorithm>
#include <cmath>

#include "tandem/hmm.h"

namespace tandem {

DecodeResult ViterbiDecode(const HmmSet &set, const Matrix &obs,
                           const DecodeConfig &config) {
  const int num_frames = static_cast<int>(obs.rows());
  if (num_frames < kNumEmittingStates)
    throw TandemError("ViterbiDecode: need at least 3 frames, got " +
                      std::to_string(num_frames));
  if (obs.cols() != set.dim)
    throw TandemError("ViterbiDecode: observation dimension " +
                      std::to_string(obs.cols()) + " does not match HMM dimension " +
                      std::to_string(set.dim));
  const int num_phonemes = set.NumPhonemes();
  const int num_states = num_phonemes * kNumEmittingStates;
  const double log_entry =
      -std::log(static_cast<double>(num_phonemes)) + config.insertion_penalty;

  std::vector<double> log_enter(num_phonemes), log_exit(num_phonemes);
  std::vector<double> log_loop(num_states), log_adv(num_states);
  Matrix em(num_frames, num_states);
  for (int k = 0; k < num_phonemes; ++k) {
    const PhonemeHmm &m = set.models[k];
    log_enter[k] = log_entry + std::log(m.trans(0, 1));
    log_exit[k] = std::log(m.trans(kNumEmittingStates, kNumEmittingStates + 1));
    for (int i = 0; i < kNumEmittingStates; ++i) {
      const int s = k * kNumEmittingStates + i;
      log_loop[s] = std::log(m.trans(i + 1, i + 1));
      log_adv[s] = std::log(m.trans(i + 1, i + 2));
      const GmmScorer scorer(m.states[i]);
      for (int t = 0; t < num_frames; ++t)
        em(t, s) = scorer.LogLikelihood(obs.row(t).data());
    }
  }

  // back(t, s) = 1 when state s at t was reached by advancing (or, for a
  // first state, by entering the phoneme); 0 for a self-loop.
  Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> back(
      num_frames, num_states);
  std::vector<int> best_exit_phoneme(num_frames, -1);
  std::vector<double> prev(num_states, kLogZero), cur(num_states, kLogZero);

  for (int k = 0; k < num_phonemes; ++k) {
    const int s = k * kNumEmittingStates;
    prev[s] = log_enter[k] + em(0, s);
    back(0, s) = 1;
    for (int i = 1; i < kNumEmittingStates; ++i) back(0, s + i) = 0;
  }

  for (int t = 1; t < num_frames; ++t) {
    double best_exit = kLogZero;
    int best_k = -1;
    for (int k = 0; k < num_phonemes; ++k) {
      const double v = prev[k * kNumEmittingStates + 2] + log_exit[k];
      if (best_k < 0 || v > best_exit) {
        best_exit = v;
        best_k = k;
      }
    }
    best_exit_phoneme[t - 1] = best_k;

    for (int k = 0; k < num_phonemes; ++k) {
      const int s0 = k * kNumEmittingStates;
      const double stay = prev[s0] + log_loop[s0];
      const double enter = best_exit + log_enter[k];
      if (enter > stay) {
        cur[s0] = enter;
        back(t, s0) = 1;
      } else {
        cur[s0] = stay;
        back(t, s0) = 0;
      }
      for (int i = 1; i < kNumEmittingStates; ++i) {
        const int s = s0 + i;
        const double stay_i = prev[s] + log_loop[s];
        const double adv = prev[s - 1] + log_adv[s - 1];
        if (adv > stay_i) {
          cur[s] = adv;
          back(t, s) = 1;
        } else {
          cur[s] = stay_i;
          back(t, s) = 0;
        }
      }
      for (int i = 0; i < kNumEmittingStates; ++i) cur[s0 + i] += em(t, s0 + i);
    }
    std::swap(prev, cur);
  }

  DecodeResult result;
  int k = -1;
  for (int j = 0; j < num_phonemes; ++j) {
    const double v = prev[j * kNumEmittingStates + 2] + log_exit[j];
    if (k < 0 || v > result.log_score) {
      result.log_score = v;
      k = j;
    }
  }
  if (result.log_score == kLogZero)
    throw TandemError("ViterbiDecode: no path through the phone loop");

  int i = kNumEmittingStates - 1;
  int end = num_frames;
  for (int t = num_frames - 1; t >= 0; --t) {
    const bool moved = back(t, k * kNumEmittingStates + i) == 1;
    if (!moved) continue;
    if (i > 0) {
      --i;
      continue;
    }
    result.phonemes.push_back(k);
    result.segments.emplace_back(t, end);
    end = t;
    if (t > 0) {
      k = best_exit_phoneme[t - 1];
      i = kNumEmittingStates - 1;
    }
  }
  std::reverse(result.phonemes.begin(), result.phonemes.end());
  std::reverse(result.segments.begin(), result.segments.end());
  return result;
}

}  // namespace tandem
