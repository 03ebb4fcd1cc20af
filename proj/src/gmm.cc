// src/gmm.cc
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

#include "tandem/gmm.h"

#include <cmath>
#include <numbers>

namespace tandem {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

}  // namespace

double LogGaussian(const GaussianComponent &comp, const Vector &x) {
  if (x.size() != comp.mean.size() || x.size() != comp.variance.size())
    throw TandemError("LogGaussian: dimension mismatch (x has " +
                      std::to_string(x.size()) + ", model has " +
                      std::to_string(comp.mean.size()) + ")");
  double acc = 0.0;
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    const double diff = x[d] - comp.mean[d];
    acc += kLog2Pi + std::log(comp.variance[d]) + diff * diff / comp.variance[d];
  }
  return -0.5 * acc;
}

double LogGmm(const GmmState &state, const Vector &x) {
  double total = kLogZero;
  for (const auto &c : state.components)
    total = LogAdd(total, std::log(c.weight) + LogGaussian(c, x));
  return total;
}

GmmScorer::GmmScorer(const GmmState &state) : dim_(state.Dim()) {
  const int m = state.NumComponents();
  log_const_.resize(m);
  mean_.resize(dim_, m);
  inv_var_.resize(dim_, m);
  for (int i = 0; i < m; ++i) {
    const auto &c = state.components[i];
    double acc = 0.0;
    for (int d = 0; d < dim_; ++d) {
      acc += kLog2Pi + std::log(c.variance[d]);
      mean_(d, i) = c.mean[d];
      inv_var_(d, i) = 1.0 / c.variance[d];
    }
    log_const_[i] = std::log(c.weight) - 0.5 * acc;
  }
}

double GmmScorer::LogLikelihood(const double *x) const {
  double total = kLogZero;
  for (size_t i = 0; i < log_const_.size(); ++i) {
    const double *mu = mean_.col(i).data();
    const double *iv = inv_var_.col(i).data();
    double q = 0.0;
    for (int d = 0; d < dim_; ++d) {
      const double diff = x[d] - mu[d];
      q += diff * diff * iv[d];
    }
    total = LogAdd(total, log_const_[i] - 0.5 * q);
  }
  return total;
}

double GmmScorer::ComponentLogLikelihoods(const double *x,
                                          std::vector<double> *out) const {
  out->resize(log_const_.size());
  double total = kLogZero;
  for (size_t i = 0; i < log_const_.size(); ++i) {
    const double *mu = mean_.col(i).data();
    const double *iv = inv_var_.col(i).data();
    double q = 0.0;
    for (int d = 0; d < dim_; ++d) {
      const double diff = x[d] - mu[d];
      q += diff * diff * iv[d];
    }
    (*out)[i] = log_const_[i] - 0.5 * q;
    total = LogAdd(total, (*out)[i]);
  }
  return total;
}

GmmState SplitGmm(const GmmState &state) {
  if (state.NumComponents() >= kMaxMixtures)
    throw TandemError("cannot split a mixture of " +
                      std::to_string(state.NumComponents()) + " components");
  GmmState out;
  for (const auto &c : state.components) {
    const Vector offset = 0.2 * c.variance.cwiseSqrt();
    out.components.push_back({0.5 * c.weight, c.mean - offset, c.variance});
    out.components.push_back({0.5 * c.weight, c.mean + offset, c.variance});
  }
  return out;
}

}  // namespace tandem
