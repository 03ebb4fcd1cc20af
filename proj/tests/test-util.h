// tests/test-util.h
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

#ifndef TANDEM_TESTS_TEST_UTIL_H_
#define TANDEM_TESTS_TEST_UTIL_H_

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "tandem/util.h"

namespace tandem::testing {

/// Scratch directory for one test binary, recreated on first use.
inline std::filesystem::path TempDir(const std::string &sub) {
  const char *env = std::getenv("TANDEM_TEST_TMP");
  std::filesystem::path base =
      env ? env : std::filesystem::temp_directory_path() / "tandem-tests";
  std::filesystem::path dir = base / sub;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double RelErr(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

inline Matrix RandomMatrix(Rng &rng, int rows, int cols, double lo = -1.0,
                           double hi = 1.0) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.Uniform(lo, hi);
  return m;
}

}  // namespace tandem::testing

#endif  // TANDEM_TESTS_TEST_UTIL_H_
