// include/tandem/util.h
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

#ifndef TANDEM_UTIL_H_
#define TANDEM_UTIL_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace tandem {

// Frames x dims, row-major so that one frame is one contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr int kSampleRate = 16000;
inline constexpr int kFrameLength = 400;  // 25 ms
inline constexpr int kFrameShift = 160;   // 10 ms
inline constexpr int kNumMelBands = 24;
inline constexpr double kEnergyFloor = 1e-10;

class TandemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of complete 400-sample frames at a 160-sample shift; a trailing
/// partial frame is dropped.
inline int NumFrames(int64_t num_samples) {
  if (num_samples < kFrameLength) return 0;
  return static_cast<int>((num_samples - kFrameLength) / kFrameShift + 1);
}

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// log(exp(a) + exp(b)) without overflow.
double LogAdd(double a, double b);

/// Deterministic generator. Uniform and Gaussian draws are computed here
/// rather than through <random> distributions, whose output is
/// implementation-defined, so that seeded artifacts are portable.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  /// Integer uniform in [0, n).
  uint64_t Below(uint64_t n);
  double Gaussian();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Mixes a base seed with an index (splitmix64 finalizer).
uint64_t DeriveSeed(uint64_t seed, uint64_t index);

uint64_t Fnv1a64(std::string_view data);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Exceptions thrown by
/// fn are rethrown (the first one, by index) after all workers finish.
void ParallelFor(int n, int jobs, const std::function<void(int)> &fn);

// Little-endian binary helpers; all readers throw TandemError on a short read.
void WriteU32(std::ostream &os, uint32_t v);
void WriteU64(std::ostream &os, uint64_t v);
void WriteF32(std::ostream &os, float v);
void WriteF64(std::ostream &os, double v);
uint32_t ReadU32(std::istream &is);
uint64_t ReadU64(std::istream &is);
float ReadF32(std::istream &is);
double ReadF64(std::istream &is);
void WriteMagic(std::ostream &os, std::string_view magic);
void ExpectMagic(std::istream &is, std::string_view magic, const std::string &what);

std::vector<std::string> SplitWhitespace(std::string_view s);
std::string Trim(std::string_view s);

}  // namespace tandem

#endif  // TANDEM_UTIL_H_
