// src/features-lf.cc
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

#include "tandem/features-lf.h"

#include <cmath>
#include <numbers>

namespace tandem {

Matrix ThreePointLrTime(const Matrix &ts) {
  const Eigen::Index rows = ts.rows();
  Matrix out(rows, ts.cols());
  for (Eigen::Index t = 0; t < rows; ++t) {
    const Eigen::Index prev = t > 0 ? t - 1 : 0;
    const Eigen::Index next = t + 1 < rows ? t + 1 : rows - 1;
    out.row(t) = 0.5 * (ts.row(next) - ts.row(prev));
  }
  return out;
}

Matrix ThreePointLrFreq(const Matrix &ts) {
  const Eigen::Index cols = ts.cols();
  Matrix out(ts.rows(), cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const Eigen::Index prev = j > 0 ? j - 1 : 0;
    const Eigen::Index next = j + 1 < cols ? j + 1 : cols - 1;
    out.col(j) = 0.5 * (ts.col(next) - ts.col(prev));
  }
  return out;
}

Vector DeltaLogPower(const Vector &log_power) {
  Matrix col = log_power;
  return ThreePointLrTime(col).col(0);
}

std::vector<double> OrthonormalDct(std::span<const double> x, int num_coeffs) {
  const int n = static_cast<int>(x.size());
  if (n == 0 || num_coeffs < 0 || num_coeffs > n)
    throw TandemError("OrthonormalDct: bad coefficient count");
  std::vector<double> y(num_coeffs);
  const double c0 = std::sqrt(1.0 / n), ck = std::sqrt(2.0 / n);
  for (int k = 0; k < num_coeffs; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += x[i] * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
    y[k] = (k == 0 ? c0 : ck) * acc;
  }
  return y;
}

std::vector<double> DctCompress24To12(std::span<const double> row) {
  if (row.size() != kNumMelBands)
    throw TandemError("DctCompress24To12: expected 24 values, got " +
                      std::to_string(row.size()));
  return OrthonormalDct(row, kLfDctCoeffs);
}

Matrix ExtractLf(const TimeSpectrumPattern &tsp) {
  const Matrix dt = ThreePointLrTime(tsp.ts);
  const Matrix df = ThreePointLrFreq(tsp.ts);
  const Vector dp = DeltaLogPower(tsp.log_power);
  const int num_frames = tsp.NumFrames();
  Matrix lf(num_frames, kLfDim);
  for (int t = 0; t < num_frames; ++t) {
    const auto ct = DctCompress24To12({dt.row(t).data(), size_t(dt.cols())});
    const auto cf = DctCompress24To12({df.row(t).data(), size_t(df.cols())});
    for (int k = 0; k < kLfDctCoeffs; ++k) {
      lf(t, k) = ct[k];
      lf(t, kLfDctCoeffs + k) = cf[k];
    }
    lf(t, 2 * kLfDctCoeffs) = dp[t];
  }
  return lf;
}

}  // namespace tandem
