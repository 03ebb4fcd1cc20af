// src/feature-io.cc
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

#include "tandem/feature-io.h"

#include <fstream>

#include "tandem/features-lf.h"
#include "tandem/features-mfcc.h"
#include "tandem/spectral.h"

namespace tandem {

std::string FrontEndName(FrontEnd fe) {
  return fe == FrontEnd::kMfcc39 ? "mfcc39" : "lf25";
}

FrontEnd ParseFrontEnd(std::string_view name) {
  if (name == "mfcc39") return FrontEnd::kMfcc39;
  if (name == "lf25") return FrontEnd::kLf25;
  throw TandemError("unknown front end '" + std::string(name) +
                    "' (expected mfcc39 or lf25)");
}

int FeatureDim(FrontEnd fe) {
  return fe == FrontEnd::kMfcc39 ? kMfccDim : kLfDim;
}

Matrix ExtractFeatures(FrontEnd fe, const Waveform &wave, double preemphasis,
                       int delta_window) {
  const TimeSpectrumPattern tsp = WaveformToTsp(wave, preemphasis);
  return fe == FrontEnd::kMfcc39 ? ExtractMfcc(tsp, delta_window)
                                 : ExtractLf(tsp);
}

void WriteTpf(const std::string &path, const Matrix &m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw TandemError("cannot write " + path);
  WriteMagic(os, "TPF1");
  WriteU32(os, static_cast<uint32_t>(m.rows()));
  WriteU32(os, static_cast<uint32_t>(m.cols()));
  for (Eigen::Index t = 0; t < m.rows(); ++t)
    for (Eigen::Index d = 0; d < m.cols(); ++d)
      WriteF32(os, static_cast<float>(m(t, d)));
  if (!os) throw TandemError("write failed: " + path);
}

Matrix ReadTpf(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw TandemError("cannot open " + path);
  ExpectMagic(is, "TPF1", path);
  const uint32_t rows = ReadU32(is);
  const uint32_t cols = ReadU32(is);
  Matrix m(rows, cols);
  try {
    for (uint32_t t = 0; t < rows; ++t)
      for (uint32_t d = 0; d < cols; ++d) m(t, d) = ReadF32(is);
  } catch (const TandemError &) {
    throw TandemError(path + ": truncated feature file");
  }
  return m;
}

}  // namespace tandem
