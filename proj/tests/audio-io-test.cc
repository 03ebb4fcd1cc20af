// tests/audio-io-test.cc
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

#include <cmath>
#include <fstream>

#include "doctest.h"
#include "tandem/audio-io.h"
#include "test-util.h"

namespace tandem {
namespace {

// Writes a PCM file with arbitrary header fields; `samples` are interleaved.
void WriteRawWav(const std::string &path, int channels, int rate, int bits,
                 const std::vector<int16_t> &samples, int format = 1,
                 int64_t truncate_bytes = 0) {
  std::ofstream os(path, std::ios::binary);
  auto u16 = [&](uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    os.write(b, 2);
  };
  const uint32_t data_bytes = static_cast<uint32_t>(samples.size() * 2);
  WriteMagic(os, "RIFF");
  WriteU32(os, 36 + data_bytes);
  WriteMagic(os, "WAVE");
  WriteMagic(os, "fmt ");
  WriteU32(os, 16);
  u16(static_cast<uint16_t>(format));
  u16(static_cast<uint16_t>(channels));
  WriteU32(os, static_cast<uint32_t>(rate));
  WriteU32(os, static_cast<uint32_t>(rate * channels * bits / 8));
  u16(static_cast<uint16_t>(channels * bits / 8));
  u16(static_cast<uint16_t>(bits));
  WriteMagic(os, "data");
  WriteU32(os, data_bytes);
  const int64_t keep = static_cast<int64_t>(samples.size()) - truncate_bytes / 2;
  for (int64_t i = 0; i < keep; ++i) u16(static_cast<uint16_t>(samples[i]));
}

TEST_CASE("mono 16 kHz file reads back with its sample count") {
  const auto dir = testing::TempDir("mono");
  std::vector<int16_t> s(16000);
  for (int i = 0; i < 16000; ++i) s[i] = static_cast<int16_t>((i % 200) * 100 - 10000);
  WriteRawWav((dir / "a.wav").string(), 1, 16000, 16, s);
  const Waveform w = ReadWav((dir / "a.wav").string());
  CHECK(w.samples.size() == 16000);
  CHECK(w.sample_rate == 16000);
  CHECK(w.samples[0] == doctest::Approx(-10000 / 32768.0));
  CHECK(ReadWavInfo((dir / "a.wav").string()).num_samples == 16000);
}

TEST_CASE("stereo downmix averages channels") {
  const auto dir = testing::TempDir("stereo");
  std::vector<int16_t> s;
  for (int i = 0; i < 1000; ++i) {
    const int16_t x = static_cast<int16_t>(i * 17 - 8000);
    s.push_back(x);
    s.push_back(static_cast<int16_t>(-x));
  }
  WriteRawWav((dir / "s.wav").string(), 2, 16000, 16, s);
  const Waveform w = ReadWav((dir / "s.wav").string());
  REQUIRE(w.samples.size() == 1000);
  for (double v : w.samples) CHECK(v == 0.0);
}

TEST_CASE("unsupported files are rejected") {
  const auto dir = testing::TempDir("bad");
  std::vector<int16_t> s(100, 0);
  WriteRawWav((dir / "8k.wav").string(), 1, 8000, 16, s);
  CHECK_THROWS_WITH_AS(ReadWav((dir / "8k.wav").string()),
                       doctest::Contains("sample rate"), TandemError);
  WriteRawWav((dir / "8bit.wav").string(), 1, 16000, 8, s);
  CHECK_THROWS_WITH_AS(ReadWav((dir / "8bit.wav").string()),
                       doctest::Contains("bit depth"), TandemError);
  WriteRawWav((dir / "float.wav").string(), 1, 16000, 16, s, 3);
  CHECK_THROWS_WITH_AS(ReadWav((dir / "float.wav").string()),
                       doctest::Contains("codec"), TandemError);
  WriteRawWav((dir / "trunc.wav").string(), 1, 16000, 16, s, 1, 40);
  CHECK_THROWS_WITH_AS(ReadWav((dir / "trunc.wav").string()),
                       doctest::Contains("truncated"), TandemError);
  {
    std::ofstream os((dir / "junk.wav").string(), std::ios::binary);
    os << "hello";
  }
  CHECK_THROWS_AS(ReadWav((dir / "junk.wav").string()), TandemError);
  CHECK_THROWS_AS(ReadWav((dir / "absent.wav").string()), TandemError);
}

TEST_CASE("WriteWav round-trips within quantization") {
  const auto dir = testing::TempDir("roundtrip");
  Waveform w;
  for (int i = 0; i < 500; ++i) w.samples.push_back(0.5 * std::sin(i * 0.01));
  WriteWav((dir / "w.wav").string(), w);
  const Waveform r = ReadWav((dir / "w.wav").string());
  REQUIRE(r.samples.size() == w.samples.size());
  for (size_t i = 0; i < w.samples.size(); ++i)
    CHECK(std::abs(r.samples[i] - w.samples[i]) <= 0.5 / 32768.0 + 1e-12);
}

TEST_CASE("frame counts") {
  Waveform w;
  w.samples.assign(16000, 0.0);
  CHECK(FrameAndWindow(w).rows() == 98);
  w.samples.assign(400, 0.0);
  CHECK(FrameAndWindow(w).rows() == 1);
  w.samples.assign(399, 0.0);
  CHECK(FrameAndWindow(w).rows() == 0);
  w.samples.clear();
  CHECK(FrameAndWindow(w).rows() == 0);

  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = static_cast<int>(rng.Below(5000));
    w.samples.assign(n, 0.1);
    const int expected = n >= 400 ? (n - 400) / 160 + 1 : 0;
    CHECK(FrameAndWindow(w).rows() == expected);
    CHECK(FrameAndWindow(w).cols() == 400);
  }
}

TEST_CASE("silence stays silent") {
  Waveform w;
  w.samples.assign(2000, 0.0);
  CHECK(FrameAndWindow(w).isZero(0.0));
}

TEST_CASE("pre-emphasis and window match a direct computation") {
  Rng rng(11);
  Waveform w;
  for (int i = 0; i < 1200; ++i) w.samples.push_back(rng.Uniform(-1.0, 1.0));
  const Matrix f = FrameAndWindow(w);
  const double pi = std::acos(-1.0);
  for (int t : {0, 3, static_cast<int>(f.rows()) - 1}) {
    for (int n : {0, 1, 199, 399}) {
      const int idx = t * 160 + n;
      const double y = idx == 0 ? w.samples[0] : w.samples[idx] - 0.97 * w.samples[idx - 1];
      const double win = 0.54 - 0.46 * std::cos(2 * pi * n / 399.0);
      CHECK(f(t, n) == doctest::Approx(y * win).epsilon(1e-14));
    }
  }
}

TEST_CASE("windowed values are bounded by (1 + 0.97) max |x|") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Waveform w;
    const double amp = rng.Uniform(0.01, 1.0);
    for (int i = 0; i < 3000; ++i) w.samples.push_back(rng.Uniform(-amp, amp));
    double max_abs = 0.0;
    for (double s : w.samples) max_abs = std::max(max_abs, std::abs(s));
    CHECK(FrameAndWindow(w).cwiseAbs().maxCoeff() <= max_abs * 1.97 + 1e-15);
  }
}

TEST_CASE("Hamming window is symmetric") {
  const auto win = HammingWindow(400);
  for (int n = 0; n < 400; ++n) CHECK(std::abs(win[n] - win[399 - n]) <= 1e-12);
  CHECK(win[0] == doctest::Approx(0.08));
}

TEST_CASE("framing requires 16 kHz") {
  Waveform w;
  w.sample_rate = 8000;
  w.samples.assign(800, 0.0);
  CHECK_THROWS_AS(FrameAndWindow(w), TandemError);
}

}  // namespace
}  // namespace tandem
