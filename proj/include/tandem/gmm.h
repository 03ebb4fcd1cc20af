// include/tandem/gmm.h
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

#ifndef TANDEM_GMM_H_
#define TANDEM_GMM_H_

#include <vector>

#include "tandem/util.h"

namespace tandem {

inline constexpr int kMaxMixtures = 16;

/// Diagonal-covariance Gaussian with its mixture weight.
struct GaussianComponent {
  double weight = 1.0;
  Vector mean;
  Vector variance;
};

struct GmmState {
  std::vector<GaussianComponent> components;

  int NumComponents() const { return static_cast<int>(components.size()); }
  int Dim() const {
    return components.empty() ? 0 : static_cast<int>(components[0].mean.size());
  }
};

/// log N(x; mean, diag(variance)).
double LogGaussian(const GaussianComponent &comp, const Vector &x);

/// log sum_m w_m N_m(x), via log-sum-exp.
double LogGmm(const GmmState &state, const Vector &x);

/// GMM with per-component constants and inverse variances cached, for the
/// inner loops of training and decoding. Results match LogGmm up to rounding.
class GmmScorer {
 public:
  explicit GmmScorer(const GmmState &state);

  double LogLikelihood(const double *x) const;
  /// Per-component log(w_m N_m(x)) into `out`; returns their log-sum.
  double ComponentLogLikelihoods(const double *x, std::vector<double> *out) const;
  int Dim() const { return dim_; }

 private:
  int dim_ = 0;
  std::vector<double> log_const_;  // log w_m - 0.5 sum_d (ln 2pi + ln var)
  Eigen::MatrixXd mean_;           // dim x M
  Eigen::MatrixXd inv_var_;        // dim x M
};

/// Doubles every component: two children with half the weight, means shifted
/// by -/+ 0.2 sigma per dimension, variance copied. Throws at 16 components.
GmmState SplitGmm(const GmmState &state);

}  // namespace tandem

#endif  // TANDEM_GMM_H_
