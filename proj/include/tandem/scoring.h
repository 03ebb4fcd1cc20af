// include/tandem/scoring.h
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

#ifndef TANDEM_SCORING_H_
#define TANDEM_SCORING_H_

#include <utility>
#include <vector>

namespace tandem {

struct AlignmentResult {
  int n_ref = 0;
  int hits = 0;
  int substitutions = 0;
  int deletions = 0;
  int insertions = 0;

  int Errors() const { return substitutions + deletions + insertions; }
};

/// Aligned (reference, hypothesis) pairs; -1 marks the gap side of a deletion
/// or insertion.
using AlignmentPath = std::vector<std::pair<int, int>>;

/// Minimum edit distance alignment with unit costs. Among equal-cost
/// alignments the one with the fewest insertions wins, which prefers a
/// substitution to an insertion+deletion pair. Throws on an empty reference.
AlignmentResult Align(const std::vector<int> &ref, const std::vector<int> &hyp,
                      AlignmentPath *path = nullptr);

/// Phoneme correct rate 100 (N - S - D) / N over pooled counts.
double Pcr(const std::vector<AlignmentResult> &results);

/// Accuracy 100 (N - S - D - I) / N over pooled counts.
double Accuracy(const std::vector<AlignmentResult> &results);

}  // namespace tandem

#endif  // TANDEM_SCORING_H_
