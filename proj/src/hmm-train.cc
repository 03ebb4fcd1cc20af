// src/hmm-train.cc
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

#include <cmath>

#include "tandem/hmm.h"

namespace tandem {

namespace {

// exp() of log-posteriors below this contributes nothing at double precision.
constexpr double kMinLogPosterior = -700.0;
constexpr double kMinOccupancy = 1e-10;
constexpr double kMinWeight = 1e-12;

StateAccumulator EmptyStateAccumulator(int num_components, int dim) {
  StateAccumulator a;
  a.occupancy = Vector::Zero(num_components);
  a.sum = Eigen::MatrixXd::Zero(dim, num_components);
  a.sum_sq = Eigen::MatrixXd::Zero(dim, num_components);
  return a;
}

}  // namespace

void HmmAccumulator::Merge(const HmmAccumulator &other) {
  for (const auto &[phoneme, states] : other.phonemes) {
    auto it = phonemes.find(phoneme);
    if (it == phonemes.end()) {
      phonemes.emplace(phoneme, states);
      continue;
    }
    for (int s = 0; s < kNumEmittingStates; ++s) {
      StateAccumulator &dst = it->second[s];
      const StateAccumulator &src = states[s];
      dst.occupancy += src.occupancy;
      dst.sum += src.sum;
      dst.sum_sq += src.sum_sq;
      dst.self_loop += src.self_loop;
      dst.advance += src.advance;
    }
  }
  total_loglik += other.total_loglik;
  frames += other.frames;
}

HmmAccumulator AccumulateUtterance(const HmmSet &set,
                                   const std::vector<int> &transcription,
                                   const Matrix &obs) {
  const ChainModel chain = BuildChain(set, transcription);
  const int num_frames = static_cast<int>(obs.rows());
  const int num_states = chain.Size();
  if (num_frames < num_states)
    throw TandemError(std::to_string(num_frames) + " frames cannot traverse " +
                      std::to_string(num_states) + " emitting states");
  const Matrix em = ChainEmissions(set, chain, obs);
  const ForwardBackwardTables fb = ForwardBackward(chain, em);
  const double total = fb.loglik;

  HmmAccumulator acc;
  acc.total_loglik = total;
  acc.frames = num_frames;
  std::vector<double> comp;
  for (int s = 0; s < num_states; ++s) {
    const int p = chain.phoneme[s], k = chain.state[s];
    const GmmState &gmm = set.models[p].states[k];
    auto [it, inserted] = acc.phonemes.try_emplace(p);
    if (inserted)
      for (int i = 0; i < kNumEmittingStates; ++i)
        it->second[i] = EmptyStateAccumulator(
            set.models[p].states[i].NumComponents(), set.dim);
    StateAccumulator &sa = it->second[k];
    const GmmScorer scorer(gmm);

    for (int t = 0; t < num_frames; ++t) {
      const double log_gamma = fb.alpha(t, s) + fb.beta(t, s) - total;
      if (log_gamma < kMinLogPosterior) continue;
      const double gamma = std::exp(log_gamma);
      const double *x = obs.row(t).data();
      const double state_ll = scorer.ComponentLogLikelihoods(x, &comp);
      for (int m = 0; m < gmm.NumComponents(); ++m) {
        const double post = gamma * std::exp(comp[m] - state_ll);
        if (post == 0.0) continue;
        sa.occupancy[m] += post;
        for (int d = 0; d < set.dim; ++d) {
          sa.sum(d, m) += post * x[d];
          sa.sum_sq(d, m) += post * x[d] * x[d];
        }
      }
    }

    for (int t = 0; t + 1 < num_frames; ++t) {
      const double a = fb.alpha(t, s);
      if (a == kLogZero) continue;
      const double loop =
          a + chain.self_loop[s] + em(t + 1, s) + fb.beta(t + 1, s) - total;
      if (loop > kMinLogPosterior) sa.self_loop += std::exp(loop);
      if (s + 1 < num_states) {
        const double adv = a + chain.advance[s] + em(t + 1, s + 1) +
                           fb.beta(t + 1, s + 1) - total;
        if (adv > kMinLogPosterior) sa.advance += std::exp(adv);
      }
    }
  }
  // The only way out at the last frame is the final exit transition.
  const int last = num_states - 1;
  acc.phonemes[chain.phoneme[last]][chain.state[last]].advance +=
      std::exp(fb.alpha(num_frames - 1, last) + fb.beta(num_frames - 1, last) - total);
  return acc;
}

void UpdateModels(const HmmAccumulator &acc, const HmmOptions &opts,
                  HmmSet *set) {
  for (const auto &[p, states] : acc.phonemes) {
    PhonemeHmm &model = set->models[p];
    for (int k = 0; k < kNumEmittingStates; ++k) {
      const StateAccumulator &sa = states[k];
      GmmState &gmm = model.states[k];

      const double occ = sa.occupancy.sum();
      if (occ > kMinOccupancy) {
        double weight_sum = 0.0;
        for (int m = 0; m < gmm.NumComponents(); ++m) {
          GaussianComponent &c = gmm.components[m];
          const double occ_m = sa.occupancy[m];
          if (occ_m > kMinOccupancy) {
            c.mean = sa.sum.col(m) / occ_m;
            c.variance = (sa.sum_sq.col(m) / occ_m - c.mean.cwiseProduct(c.mean))
                             .cwiseMax(opts.variance_floor);
          }
          c.weight = std::max(occ_m / occ, kMinWeight);
          weight_sum += c.weight;
        }
        for (auto &c : gmm.components) c.weight /= weight_sum;
      }

      const double out = sa.self_loop + sa.advance;
      if (out > kMinOccupancy) {
        model.trans(k + 1, k + 1) = sa.self_loop / out;
        model.trans(k + 1, k + 2) = sa.advance / out;
      }
    }
  }
}

std::vector<double> TrainEmbedded(HmmSet *set,
                                  const std::vector<Matrix> &observations,
                                  const std::vector<std::vector<int>> &transcriptions,
                                  int iterations, const HmmOptions &opts,
                                  int jobs) {
  if (observations.empty()) throw TandemError("TrainEmbedded: empty corpus");
  if (observations.size() != transcriptions.size())
    throw TandemError("TrainEmbedded: observation/transcription count mismatch");
  for (size_t u = 0; u < observations.size(); ++u) {
    const auto &tr = transcriptions[u];
    if (tr.empty())
      throw TandemError("TrainEmbedded: utterance " + std::to_string(u) +
                        " has an empty transcription");
    for (int p : tr)
      if (p < 0 || p >= set->NumPhonemes())
        throw TandemError("TrainEmbedded: no model for phoneme id " +
                          std::to_string(p));
    const auto needed = static_cast<Eigen::Index>(tr.size()) * kNumEmittingStates;
    if (observations[u].rows() < needed)
      throw TandemError("TrainEmbedded: utterance " + std::to_string(u) + " has " +
                        std::to_string(observations[u].rows()) +
                        " frames, its transcription needs at least " +
                        std::to_string(needed));
  }

  std::vector<double> trace;
  const int n = static_cast<int>(observations.size());
  std::vector<HmmAccumulator> per_utt(n);
  for (int iter = 0; iter < iterations; ++iter) {
    ParallelFor(n, jobs, [&](int u) {
      per_utt[u] = AccumulateUtterance(*set, transcriptions[u], observations[u]);
    });
    HmmAccumulator total;
    for (auto &a : per_utt) {
      total.Merge(a);
      a = HmmAccumulator();
    }
    trace.push_back(total.total_loglik);
    UpdateModels(total, opts, set);
  }
  return trace;
}

}  // namespace tandem
