// include/tandem/features-mfcc.h
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

#ifndef TANDEM_FEATURES_MFCC_H_
#define TANDEM_FEATURES_MFCC_H_

#include "tandem/spectral.h"
#include "tandem/util.h"

namespace tandem {

inline constexpr int kNumCepstra = 12;
inline constexpr int kMfccStaticDim = kNumCepstra + 1;
inline constexpr int kMfccDim = 3 * kMfccStaticDim;

// Column layout of the 39-dim vector:
//   [c1..c12 | P | dc1..dc12 | dP | ddc1..ddc12 | ddP]

/// c1..c12 of the orthonormal DCT-II over the 24 log-mel bands; c0 is
/// dropped since energy travels separately as P.
Matrix Cepstra(const TimeSpectrumPattern &tsp);

/// d[t] = sum_{k=1..W} k (x[t+k] - x[t-k]) / (2 sum k^2), edges replicated.
Matrix Deltas(const Matrix &x, int window = 2);

Matrix ExtractMfcc(const TimeSpectrumPattern &tsp, int delta_window = 2);

}  // namespace tandem

#endif  // TANDEM_FEATURES_MFCC_H_
