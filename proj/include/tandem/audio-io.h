// include/tandem/audio-io.h
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

#ifndef TANDEM_AUDIO_IO_H_
#define TANDEM_AUDIO_IO_H_

#include <cstdint>
#include <string>
#include <vector>

#include "tandem/util.h"

namespace tandem {

struct Waveform {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = kSampleRate;
};

struct WavInfo {
  int sample_rate = 0;
  int num_channels = 0;
  int64_t num_samples = 0;  // per channel
};

/// Parses the RIFF header of a 16-bit PCM file without decoding samples.
WavInfo ReadWavInfo(const std::string &path);

/// Reads a 16 kHz, 16-bit PCM WAV file. Samples are divided by 32768 and
/// stereo is downmixed by averaging the two channels.
Waveform ReadWav(const std::string &path);

/// Writes mono 16-bit PCM; samples are clipped to [-1, 1) before quantizing.
void WriteWav(const std::string &path, const Waveform &wave);

/// Pre-emphasis over the whole signal, then 400-sample frames every 160
/// samples, each multiplied by a Hamming window. Rows are frames.
Matrix FrameAndWindow(const Waveform &wave, double preemphasis = 0.97);

/// 0.54 - 0.46 cos(2 pi n / (N - 1)).
std::vector<double> HammingWindow(int length);

}  // namespace tandem

#endif  // TANDEM_AUDIO_IO_H_
