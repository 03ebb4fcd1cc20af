// src/spectral.cc
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

#include "tandem/spectral.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

namespace tandem {

namespace {

// The plan is created once; fftw_execute_dft_r2c on new arrays is
// thread-safe, planning is not.
class RealFft {
 public:
  RealFft() {
    std::vector<double> in(kFftSize);
    std::vector<std::complex<double>> out(kNumFftBins);
    plan_ = fftw_plan_dft_r2c_1d(
        kFftSize, in.data(), reinterpret_cast<fftw_complex *>(out.data()),
        FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  ~RealFft() { fftw_destroy_plan(plan_); }
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  void Execute(double *in, std::complex<double> *out) const {
    fftw_execute_dft_r2c(plan_, in, reinterpret_cast<fftw_complex *>(out));
  }

 private:
  fftw_plan plan_;
};

const RealFft &SharedFft() {
  static const RealFft fft;
  return fft;
}

}  // namespace

double MelScale(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double InverseMelScale(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank BuildMelFilterbank(int num_filters, int sample_rate,
                                 int fft_size) {
  if (num_filters < 1) throw TandemError("filterbank needs at least 1 filter");
  if (fft_size < 2) throw TandemError("fft_size too small");
  const double nyquist = sample_rate / 2.0;
  const double mel_max = MelScale(nyquist);
  std::vector<double> edges(num_filters + 2);
  for (int i = 0; i < num_filters + 2; ++i)
    edges[i] = InverseMelScale(mel_max * i / (num_filters + 1));

  const int num_bins = fft_size / 2 + 1;
  MelFilterbank fb;
  fb.sample_rate = sample_rate;
  fb.fft_size = fft_size;
  for (int j = 0; j < num_filters; ++j) {
    const double lo = edges[j], peak = edges[j + 1], hi = edges[j + 2];
    MelFilter filter;
    filter.first_bin = -1;
    for (int k = 0; k < num_bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / fft_size;
      double w = 0.0;
      if (f > lo && f <= peak) {
        w = (f - lo) / (peak - lo);
      } else if (f > peak && f < hi) {
        w = (hi - f) / (hi - peak);
      }
      if (w > 0.0) {
        if (filter.first_bin < 0) filter.first_bin = k;
        filter.weights.resize(k - filter.first_bin + 1, 0.0);
        filter.weights.back() = w;
      }
    }
    if (filter.first_bin < 0)
      throw TandemError("fft_size " + std::to_string(fft_size) +
                        " too small: mel filter " + std::to_string(j) +
                        " spans no FFT bin");
    fb.filters.push_back(std::move(filter));
    fb.center_hz.push_back(peak);
  }
  return fb;
}

Matrix PowerSpectrum(const Matrix &frames) {
  if (frames.cols() > kFftSize)
    throw TandemError("PowerSpectrum: frame longer than FFT size");
  const RealFft &fft = SharedFft();
  Matrix spec(frames.rows(), kNumFftBins);
  std::vector<double> in(kFftSize);
  std::vector<std::complex<double>> out(kNumFftBins);
  for (Eigen::Index t = 0; t < frames.rows(); ++t) {
    std::fill(in.begin(), in.end(), 0.0);
    for (Eigen::Index n = 0; n < frames.cols(); ++n) in[n] = frames(t, n);
    fft.Execute(in.data(), out.data());
    for (int k = 0; k < kNumFftBins; ++k) spec(t, k) = std::norm(out[k]);
  }
  return spec;
}

TimeSpectrumPattern ComputeTimeSpectrumPattern(const Matrix &frames,
                                               const MelFilterbank &fb) {
  if (fb.fft_size != kFftSize)
    throw TandemError("filterbank FFT size does not match the 512-point FFT");
  const Matrix spec = PowerSpectrum(frames);
  const int num_frames = static_cast<int>(frames.rows());
  TimeSpectrumPattern tsp;
  tsp.ts.resize(num_frames, fb.NumFilters());
  tsp.log_power.resize(num_frames);
  for (int t = 0; t < num_frames; ++t) {
    for (int j = 0; j < fb.NumFilters(); ++j) {
      const MelFilter &f = fb.filters[j];
      double e = 0.0;
      for (size_t i = 0; i < f.weights.size(); ++i)
        e += f.weights[i] * spec(t, f.first_bin + static_cast<int>(i));
      tsp.ts(t, j) = std::log(std::max(e, kEnergyFloor));
    }
    tsp.log_power[t] =
        std::log(std::max(frames.row(t).squaredNorm(), kEnergyFloor));
  }
  return tsp;
}

const MelFilterbank &DefaultFilterbank() {
  static const MelFilterbank fb = BuildMelFilterbank();
  return fb;
}

TimeSpectrumPattern WaveformToTsp(const Waveform &wave, double preemphasis) {
  return ComputeTimeSpectrumPattern(FrameAndWindow(wave, preemphasis),
                                    DefaultFilterbank());
}

}  // namespace tandem
