// src/features-mfcc.cc
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

#include "tandem/features-mfcc.h"

#include <algorithm>

#include "tandem/features-lf.h"

namespace tandem {

Matrix Cepstra(const TimeSpectrumPattern &tsp) {
  const int num_frames = tsp.NumFrames();
  const int bands = static_cast<int>(tsp.ts.cols());
  Matrix c(num_frames, kNumCepstra);
  for (int t = 0; t < num_frames; ++t) {
    const auto y = OrthonormalDct({tsp.ts.row(t).data(), size_t(bands)},
                                  kNumCepstra + 1);
    for (int k = 0; k < kNumCepstra; ++k) c(t, k) = y[k + 1];
  }
  return c;
}

Matrix Deltas(const Matrix &x, int window) {
  if (window < 1) throw TandemError("Deltas: window must be >= 1");
  const Eigen::Index rows = x.rows();
  double denom = 0.0;
  for (int k = 1; k <= window; ++k) denom += k * k;
  denom *= 2.0;
  Matrix d = Matrix::Zero(rows, x.cols());
  for (Eigen::Index t = 0; t < rows; ++t) {
    for (int k = 1; k <= window; ++k) {
      const Eigen::Index next = std::min<Eigen::Index>(t + k, rows - 1);
      const Eigen::Index prev = std::max<Eigen::Index>(t - k, 0);
      d.row(t) += k * (x.row(next) - x.row(prev));
    }
    d.row(t) /= denom;
  }
  return d;
}

Matrix ExtractMfcc(const TimeSpectrumPattern &tsp, int delta_window) {
  const int num_frames = tsp.NumFrames();
  Matrix statics(num_frames, kMfccStaticDim);
  statics.leftCols(kNumCepstra) = Cepstra(tsp);
  statics.col(kNumCepstra) = tsp.log_power;
  const Matrix d1 = Deltas(statics, delta_window);
  const Matrix d2 = Deltas(d1, delta_window);
  Matrix out(num_frames, kMfccDim);
  if (num_frames == 0) return out;
  out << statics, d1, d2;
  return out;
}

}  // namespace tandem
