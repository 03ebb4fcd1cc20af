// src/audio-io.cc
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

#include "tandem/audio-io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>

namespace tandem {

namespace {

struct ParsedHeader {
  WavInfo info;
  std::streamoff data_offset = 0;
  uint32_t data_bytes = 0;
};

uint16_t ReadU16(std::istream &is) {
  unsigned char b[2];
  if (!is.read(reinterpret_cast<char *>(b), 2))
    throw TandemError("truncated WAV header");
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

ParsedHeader ParseHeader(std::istream &is, const std::string &path) {
  char tag[4];
  auto read_tag = [&]() {
    if (!is.read(tag, 4)) throw TandemError(path + ": truncated WAV header");
  };
  read_tag();
  if (std::memcmp(tag, "RIFF", 4) != 0)
    throw TandemError(path + ": not a RIFF file");
  ReadU32(is);
  read_tag();
  if (std::memcmp(tag, "WAVE", 4) != 0)
    throw TandemError(path + ": not a WAVE file");

  ParsedHeader h;
  bool have_fmt = false;
  int bits = 0;
  while (true) {
    if (!is.read(tag, 4)) {
      throw TandemError(path + ": no data chunk (truncated file)");
    }
    uint32_t size;
    try {
      size = ReadU32(is);
    } catch (const TandemError &) {
      throw TandemError(path + ": truncated WAV chunk header");
    }
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (size < 16) throw TandemError(path + ": malformed fmt chunk");
      uint16_t format = ReadU16(is);
      h.info.num_channels = ReadU16(is);
      h.info.sample_rate = static_cast<int>(ReadU32(is));
      ReadU32(is);  // byte rate
      ReadU16(is);  // block align
      bits = ReadU16(is);
      if (format == 0xFFFE && size >= 40) {
        // WAVE_FORMAT_EXTENSIBLE: the sub-format GUID starts with the codec.
        ReadU16(is);
        ReadU16(is);
        ReadU32(is);
        format = ReadU16(is);
        is.seekg(size - 26, std::ios::cur);
      } else {
        is.seekg(size - 16 + (size & 1), std::ios::cur);
      }
      if (format != 1)
        throw TandemError(path + ": unsupported codec " +
                          std::to_string(format) + " (only PCM)");
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) throw TandemError(path + ": data chunk before fmt chunk");
      h.data_offset = is.tellg();
      h.data_bytes = size;
      break;
    } else {
      is.seekg(size + (size & 1), std::ios::cur);
    }
  }
  if (bits != 16)
    throw TandemError(path + ": unsupported bit depth " + std::to_string(bits));
  if (h.info.num_channels != 1 && h.info.num_channels != 2)
    throw TandemError(path + ": unsupported channel count " +
                      std::to_string(h.info.num_channels));
  if (h.info.sample_rate != kSampleRate)
    throw TandemError(path + ": sample rate " +
                      std::to_string(h.info.sample_rate) + " Hz, need 16000");
  h.info.num_samples = h.data_bytes / (2 * h.info.num_channels);
  return h;
}

std::ifstream OpenBinary(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw TandemError("cannot open " + path);
  return is;
}

}  // namespace

WavInfo ReadWavInfo(const std::string &path) {
  std::ifstream is = OpenBinary(path);
  return ParseHeader(is, path).info;
}

Waveform ReadWav(const std::string &path) {
  std::ifstream is = OpenBinary(path);
  ParsedHeader h = ParseHeader(is, path);
  std::vector<unsigned char> raw(h.data_bytes);
  if (!is.read(reinterpret_cast<char *>(raw.data()), h.data_bytes))
    throw TandemError(path + ": truncated data chunk");

  const int channels = h.info.num_channels;
  Waveform wave;
  wave.sample_rate = h.info.sample_rate;
  wave.samples.resize(h.info.num_samples);
  auto sample_at = [&](int64_t i) {
    return static_cast<int16_t>(raw[2 * i] | (raw[2 * i + 1] << 8)) / 32768.0;
  };
  for (int64_t n = 0; n < h.info.num_samples; ++n) {
    if (channels == 1) {
      wave.samples[n] = sample_at(n);
    } else {
      wave.samples[n] = 0.5 * (sample_at(2 * n) + sample_at(2 * n + 1));
    }
  }
  return wave;
}

void WriteWav(const std::string &path, const Waveform &wave) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw TandemError("cannot write " + path);
  const uint32_t data_bytes = static_cast<uint32_t>(wave.samples.size() * 2);
  auto u16 = [&](uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    os.write(b, 2);
  };
  WriteMagic(os, "RIFF");
  WriteU32(os, 36 + data_bytes);
  WriteMagic(os, "WAVE");
  WriteMagic(os, "fmt ");
  WriteU32(os, 16);
  u16(1);
  u16(1);
  WriteU32(os, static_cast<uint32_t>(wave.sample_rate));
  WriteU32(os, static_cast<uint32_t>(wave.sample_rate) * 2);
  u16(2);
  u16(16);
  WriteMagic(os, "data");
  WriteU32(os, data_bytes);
  for (double s : wave.samples) {
    const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
    u16(static_cast<uint16_t>(
        static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0))));
  }
  if (!os) throw TandemError("write failed: " + path);
}

std::vector<double> HammingWindow(int length) {
  std::vector<double> w(length);
  for (int n = 0; n < length; ++n)
    w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (length - 1));
  return w;
}

Matrix FrameAndWindow(const Waveform &wave, double preemphasis) {
  if (wave.sample_rate != kSampleRate)
    throw TandemError("FrameAndWindow: sample rate must be 16000");
  const auto &x = wave.samples;
  const int num_frames = NumFrames(static_cast<int64_t>(x.size()));
  Matrix frames(num_frames, kFrameLength);
  if (num_frames == 0) return frames;

  std::vector<double> y(x.size());
  y[0] = x[0];
  for (size_t n = 1; n < x.size(); ++n) y[n] = x[n] - preemphasis * x[n - 1];

  static const std::vector<double> window = HammingWindow(kFrameLength);
  for (int t = 0; t < num_frames; ++t) {
    const double *src = y.data() + static_cast<size_t>(t) * kFrameShift;
    for (int n = 0; n < kFrameLength; ++n) frames(t, n) = src[n] * window[n];
  }
  return frames;
}

}  // namespace tandem
