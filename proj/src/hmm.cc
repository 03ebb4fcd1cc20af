// src/hmm.cc
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

#include "tandem/hmm.h"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace tandem {

Eigen::Matrix<double, kNumHmmStates, kNumHmmStates, Eigen::RowMajor>
PhonemeHmm::LeftToRight(double self_loop) {
  Eigen::Matrix<double, kNumHmmStates, kNumHmmStates, Eigen::RowMajor> t =
      Eigen::Matrix<double, kNumHmmStates, kNumHmmStates, Eigen::RowMajor>::Zero();
  t(0, 1) = 1.0;
  for (int i = 1; i <= kNumEmittingStates; ++i) {
    t(i, i) = self_loop;
    t(i, i + 1) = 1.0 - self_loop;
  }
  return t;
}

int HmmSet::NumMixtures() const {
  return models.empty() ? 0 : models[0].states[0].NumComponents();
}

HmmSet FlatStart(int num_phonemes, int dim, uint64_t inventory_hash,
                 const std::vector<Matrix> &observations,
                 const HmmOptions &opts) {
  if (num_phonemes < 1 || dim < 1)
    throw TandemError("FlatStart: need at least one phoneme and dimension");
  Vector sum = Vector::Zero(dim), sum_sq = Vector::Zero(dim);
  int64_t count = 0;
  for (const auto &obs : observations) {
    if (obs.rows() == 0) continue;
    if (obs.cols() != dim)
      throw TandemError("FlatStart: observation dimension " +
                        std::to_string(obs.cols()) + " != " + std::to_string(dim));
    sum += obs.colwise().sum().transpose();
    sum_sq += obs.array().square().colwise().sum().matrix().transpose();
    count += obs.rows();
  }
  if (count == 0) throw TandemError("FlatStart: no training frames");
  const Vector mean = sum / static_cast<double>(count);
  Vector var = sum_sq / static_cast<double>(count) - mean.cwiseProduct(mean);
  var = var.cwiseMax(opts.variance_floor);

  HmmSet set;
  set.inventory_hash = inventory_hash;
  set.dim = dim;
  set.models.resize(num_phonemes);
  for (int p = 0; p < num_phonemes; ++p) {
    PhonemeHmm &m = set.models[p];
    m.phoneme_id = p;
    for (auto &s : m.states) s.components = {{1.0, mean, var}};
    m.trans = PhonemeHmm::LeftToRight(opts.init_self_loop);
  }
  return set;
}

HmmSet SplitMixtures(const HmmSet &set) {
  HmmSet out = set;
  for (auto &m : out.models)
    for (auto &s : m.states) s = SplitGmm(s);
  return out;
}

ChainModel BuildChain(const HmmSet &set, const std::vector<int> &transcription) {
  if (transcription.empty()) throw TandemError("empty transcription");
  ChainModel chain;
  for (size_t i = 0; i < transcription.size(); ++i) {
    const int p = transcription[i];
    if (p < 0 || p >= set.NumPhonemes())
      throw TandemError("no HMM for phoneme id " + std::to_string(p));
    const auto &t = set.models[p].trans;
    for (int s = 0; s < kNumEmittingStates; ++s) {
      chain.phoneme.push_back(p);
      chain.state.push_back(s);
      chain.self_loop.push_back(std::log(t(s + 1, s + 1)));
      double adv = std::log(t(s + 1, s + 2));
      // Leaving the last emitting state passes through exit and the next
      // model's entry.
      if (s == kNumEmittingStates - 1 && i + 1 < transcription.size())
        adv += std::log(set.models[transcription[i + 1]].trans(0, 1));
      chain.advance.push_back(adv);
    }
  }
  chain.enter = std::log(set.models[transcription[0]].trans(0, 1));
  return chain;
}

Matrix ChainEmissions(const HmmSet &set, const ChainModel &chain,
                      const Matrix &obs) {
  if (obs.rows() > 0 && obs.cols() != set.dim)
    throw TandemError("observation dimension " + std::to_string(obs.cols()) +
                      " does not match HMM dimension " + std::to_string(set.dim));
  // Score each distinct (phoneme, state) once.
  std::map<std::pair<int, int>, int> column_of;
  std::vector<std::pair<int, int>> distinct;
  for (int s = 0; s < chain.Size(); ++s) {
    auto key = std::make_pair(chain.phoneme[s], chain.state[s]);
    if (column_of.emplace(key, static_cast<int>(distinct.size())).second)
      distinct.push_back(key);
  }
  Matrix scores(obs.rows(), static_cast<Eigen::Index>(distinct.size()));
  for (size_t c = 0; c < distinct.size(); ++c) {
    const GmmScorer scorer(set.models[distinct[c].first].states[distinct[c].second]);
    for (Eigen::Index t = 0; t < obs.rows(); ++t)
      scores(t, c) = scorer.LogLikelihood(obs.row(t).data());
  }
  Matrix em(obs.rows(), chain.Size());
  for (int s = 0; s < chain.Size(); ++s)
    em.col(s) = scores.col(column_of.at({chain.phoneme[s], chain.state[s]}));
  return em;
}

ForwardBackwardTables ForwardBackward(const ChainModel &chain,
                                      const Matrix &emissions) {
  const int num_frames = static_cast<int>(emissions.rows());
  const int num_states = chain.Size();
  if (num_frames < num_states)
    throw TandemError(std::to_string(num_frames) + " frames cannot traverse " +
                      std::to_string(num_states) + " emitting states");
  ForwardBackwardTables fb;
  fb.alpha = Matrix::Constant(num_frames, num_states, kLogZero);
  fb.beta = Matrix::Constant(num_frames, num_states, kLogZero);

  fb.alpha(0, 0) = chain.enter + emissions(0, 0);
  for (int t = 1; t < num_frames; ++t) {
    // State s is reachable at t only if s <= t, and must still be able to
    // finish: s >= num_states - (num_frames - t).
    const int lo = std::max(0, num_states - (num_frames - t));
    const int hi = std::min(num_states - 1, t);
    for (int s = lo; s <= hi; ++s) {
      double a = fb.alpha(t - 1, s) + chain.self_loop[s];
      if (s > 0) a = LogAdd(a, fb.alpha(t - 1, s - 1) + chain.advance[s - 1]);
      fb.alpha(t, s) = a + emissions(t, s);
    }
  }
  fb.loglik = fb.alpha(num_frames - 1, num_states - 1) + chain.advance.back();

  fb.beta(num_frames - 1, num_states - 1) = chain.advance.back();
  for (int t = num_frames - 2; t >= 0; --t) {
    const int lo = std::max(0, num_states - (num_frames - t));
    const int hi = std::min(num_states - 1, t);
    for (int s = lo; s <= hi; ++s) {
      double b = chain.self_loop[s] + emissions(t + 1, s) + fb.beta(t + 1, s);
      if (s + 1 < num_states)
        b = LogAdd(b, chain.advance[s] + emissions(t + 1, s + 1) +
                          fb.beta(t + 1, s + 1));
      fb.beta(t, s) = b;
    }
  }
  return fb;
}

double ForwardLogLik(const HmmSet &set, const std::vector<int> &transcription,
                     const Matrix &obs) {
  const ChainModel chain = BuildChain(set, transcription);
  if (obs.rows() < chain.Size())
    throw TandemError(std::to_string(obs.rows()) + " frames cannot traverse " +
                      std::to_string(chain.Size()) + " emitting states");
  return ForwardBackward(chain, ChainEmissions(set, chain, obs)).loglik;
}

Matrix LogTransformObservations(const Matrix &obs) {
  return obs.unaryExpr([](double y) { return std::log(std::max(y, 1e-6)); });
}

void SaveHmmSet(const std::string &path, const HmmSet &set) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw TandemError("cannot write " + path);
  WriteMagic(os, "THMM");
  WriteU32(os, 1);
  WriteU64(os, set.inventory_hash);
  WriteU32(os, static_cast<uint32_t>(set.NumPhonemes()));
  WriteU32(os, static_cast<uint32_t>(set.dim));
  for (const auto &m : set.models) {
    for (int i = 0; i < kNumHmmStates; ++i)
      for (int j = 0; j < kNumHmmStates; ++j) WriteF64(os, m.trans(i, j));
    for (const auto &s : m.states) {
      WriteU32(os, static_cast<uint32_t>(s.NumComponents()));
      for (const auto &c : s.components) {
        WriteF64(os, c.weight);
        for (int d = 0; d < set.dim; ++d) WriteF64(os, c.mean[d]);
        for (int d = 0; d < set.dim; ++d) WriteF64(os, c.variance[d]);
      }
    }
  }
  if (!os) throw TandemError("write failed: " + path);
}

HmmSet LoadHmmSet(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw TandemError("cannot open HMM file " + path);
  try {
    ExpectMagic(is, "THMM", path);
    if (ReadU32(is) != 1) throw TandemError("unsupported HMM file version");
    HmmSet set;
    set.inventory_hash = ReadU64(is);
    const uint32_t num_phonemes = ReadU32(is);
    set.dim = static_cast<int>(ReadU32(is));
    set.models.resize(num_phonemes);
    for (uint32_t p = 0; p < num_phonemes; ++p) {
      PhonemeHmm &m = set.models[p];
      m.phoneme_id = static_cast<int>(p);
      for (int i = 0; i < kNumHmmStates; ++i)
        for (int j = 0; j < kNumHmmStates; ++j) m.trans(i, j) = ReadF64(is);
      for (auto &s : m.states) {
        const uint32_t num_comp = ReadU32(is);
        if (num_comp == 0 || num_comp > kMaxMixtures)
          throw TandemError("bad component count " + std::to_string(num_comp));
        s.components.resize(num_comp);
        for (auto &c : s.components) {
          c.weight = ReadF64(is);
          c.mean.resize(set.dim);
          c.variance.resize(set.dim);
          for (int d = 0; d < set.dim; ++d) c.mean[d] = ReadF64(is);
          for (int d = 0; d < set.dim; ++d) c.variance[d] = ReadF64(is);
        }
      }
    }
    return set;
  } catch (const TandemError &e) {
    throw TandemError(path + ": " + e.what());
  }
}

}  // namespace tandem
