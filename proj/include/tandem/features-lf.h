// include/tandem/features-lf.h
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

#ifndef TANDEM_FEATURES_LF_H_
#define TANDEM_FEATURES_LF_H_

#include <span>
#include <vector>

#include "tandem/spectral.h"
#include "tandem/util.h"

namespace tandem {

inline constexpr int kLfDctCoeffs = 12;
inline constexpr int kLfDim = 2 * kLfDctCoeffs + 1;  // [12 dt | 12 df | dP]

/// Least-squares slope over three consecutive frames, (x[t+1] - x[t-1]) / 2,
/// per column. Out-of-range frames replicate the edge frame.
Matrix ThreePointLrTime(const Matrix &ts);

/// Same regression taken across the band index of each frame.
Matrix ThreePointLrFreq(const Matrix &ts);

/// Three-point slope of the log-power track.
Vector DeltaLogPower(const Vector &log_power);

/// Orthonormal DCT-II of x, first num_coeffs coefficients:
///   y[k] = c(k) sum_n x[n] cos(pi (2n+1) k / 2N),
///   c(0) = sqrt(1/N), c(k>0) = sqrt(2/N).
std::vector<double> OrthonormalDct(std::span<const double> x, int num_coeffs);

/// Keeps the 12 lowest DCT coefficients of a 24-band row.
std::vector<double> DctCompress24To12(std::span<const double> row);

/// 25-dim local features: DCT-compressed time and frequency slope maps of the
/// log-mel pattern followed by the log-power slope.
Matrix ExtractLf(const TimeSpectrumPattern &tsp);

}  // namespace tandem

#endif  // TANDEM_FEATURES_LF_H_
