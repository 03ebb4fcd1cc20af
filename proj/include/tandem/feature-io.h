// include/tandem/feature-io.h
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

#ifndef TANDEM_FEATURE_IO_H_
#define TANDEM_FEATURE_IO_H_

#include <string>
#include <string_view>

#include "tandem/audio-io.h"
#include "tandem/util.h"

namespace tandem {

enum class FrontEnd { kMfcc39, kLf25 };

/// "mfcc39" / "lf25".
std::string FrontEndName(FrontEnd fe);
FrontEnd ParseFrontEnd(std::string_view name);
int FeatureDim(FrontEnd fe);

/// Waveform -> TS pattern -> MFCC or LF vectors.
Matrix ExtractFeatures(FrontEnd fe, const Waveform &wave,
                       double preemphasis = 0.97, int delta_window = 2);

// Feature/posterior file: "TPF1", u32 frame count, u32 dim (little-endian),
// then row-major float32 values.
void WriteTpf(const std::string &path, const Matrix &m);
Matrix ReadTpf(const std::string &path);

}  // namespace tandem

#endif  // TANDEM_FEATURE_IO_H_
