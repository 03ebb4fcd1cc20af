// include/tandem/spectral.h
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

#ifndef TANDEM_SPECTRAL_H_
#define TANDEM_SPECTRAL_H_

#include <vector>

#include "tandem/audio-io.h"
#include "tandem/util.h"

namespace tandem {

inline constexpr int kFftSize = 512;
inline constexpr int kNumFftBins = kFftSize / 2 + 1;

/// Per-frame log-mel spectrum plus per-frame log energy; the input shared by
/// both front-ends.
struct TimeSpectrumPattern {
  Matrix ts;         // T x 24, ln(max(mel energy, 1e-10))
  Vector log_power;  // length T, ln(max(sum of squared frame samples, 1e-10))

  int NumFrames() const { return static_cast<int>(ts.rows()); }
};

struct MelFilter {
  int first_bin = 0;
  std::vector<double> weights;  // weights for bins first_bin, first_bin+1, ...
};

struct MelFilterbank {
  int sample_rate = kSampleRate;
  int fft_size = kFftSize;
  std::vector<MelFilter> filters;

  int NumFilters() const { return static_cast<int>(filters.size()); }
  /// Center frequency (Hz) of filter j, i.e. its peak edge.
  std::vector<double> center_hz;
};

double MelScale(double hz);
double InverseMelScale(double mel);

/// Triangular filters on (num_filters + 2) mel-spaced edges between 0 Hz and
/// Nyquist; filter j rises from edge j to a peak of 1 at edge j+1 and falls to
/// edge j+2. Throws if any filter covers no FFT bin.
MelFilterbank BuildMelFilterbank(int num_filters = kNumMelBands,
                                 int sample_rate = kSampleRate,
                                 int fft_size = kFftSize);

/// |FFT|^2 of each zero-padded frame, bins 0..256. Frames must have at most
/// 512 samples.
Matrix PowerSpectrum(const Matrix &frames);

TimeSpectrumPattern ComputeTimeSpectrumPattern(const Matrix &frames,
                                               const MelFilterbank &fb);

/// The default 24-band filterbank, built once.
const MelFilterbank &DefaultFilterbank();

/// Framing, windowing and the TS pattern in one call with default settings.
TimeSpectrumPattern WaveformToTsp(const Waveform &wave,
                                  double preemphasis = 0.97);

}  // namespace tandem

#endif  // TANDEM_SPECTRAL_H_
