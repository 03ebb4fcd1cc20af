// src/scoring.cc
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

#include "tandem/scoring.h"

#include <algorithm>

#include "tandem/util.h"

namespace tandem {

namespace {

struct Cell {
  int cost = 0;
  int insertions = 0;
  char move = 0;  // 'M'atch/sub, 'D'eletion, 'I'nsertion

  bool Better(const Cell &o) const {
    return cost != o.cost ? cost < o.cost : insertions < o.insertions;
  }
};

}  // namespace

AlignmentResult Align(const std::vector<int> &ref, const std::vector<int> &hyp,
                      AlignmentPath *path) {
  if (ref.empty()) throw TandemError("Align: empty reference");
  const size_t n = ref.size(), m = hyp.size();
  std::vector<std::vector<Cell>> dp(n + 1, std::vector<Cell>(m + 1));
  for (size_t i = 1; i <= n; ++i) dp[i][0] = {static_cast<int>(i), 0, 'D'};
  for (size_t j = 1; j <= m; ++j)
    dp[0][j] = {static_cast<int>(j), static_cast<int>(j), 'I'};
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const Cell &d = dp[i - 1][j - 1];
      Cell best{d.cost + (ref[i - 1] == hyp[j - 1] ? 0 : 1), d.insertions, 'M'};
      const Cell del{dp[i - 1][j].cost + 1, dp[i - 1][j].insertions, 'D'};
      const Cell ins{dp[i][j - 1].cost + 1, dp[i][j - 1].insertions + 1, 'I'};
      if (del.Better(best)) best = del;
      if (ins.Better(best)) best = ins;
      dp[i][j] = best;
    }
  }

  AlignmentResult r;
  r.n_ref = static_cast<int>(n);
  AlignmentPath local;
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const char move = dp[i][j].move;
    if (move == 'M') {
      if (ref[i - 1] == hyp[j - 1]) {
        ++r.hits;
      } else {
        ++r.substitutions;
      }
      local.emplace_back(ref[i - 1], hyp[j - 1]);
      --i;
      --j;
    } else if (move == 'D') {
      ++r.deletions;
      local.emplace_back(ref[i - 1], -1);
      --i;
    } else {
      ++r.insertions;
      local.emplace_back(-1, hyp[j - 1]);
      --j;
    }
  }
  if (path) {
    std::reverse(local.begin(), local.end());
    *path = std::move(local);
  }
  return r;
}

namespace {

AlignmentResult Pool(const std::vector<AlignmentResult> &results) {
  if (results.empty()) throw TandemError("no alignment results to score");
  AlignmentResult total;
  for (const auto &r : results) {
    total.n_ref += r.n_ref;
    total.hits += r.hits;
    total.substitutions += r.substitutions;
    total.deletions += r.deletions;
    total.insertions += r.insertions;
  }
  if (total.n_ref <= 0) throw TandemError("no reference phonemes to score");
  return total;
}

}  // namespace

double Pcr(const std::vector<AlignmentResult> &results) {
  const AlignmentResult t = Pool(results);
  return 100.0 * (t.n_ref - t.substitutions - t.deletions) / t.n_ref;
}

double Accuracy(const std::vector<AlignmentResult> &results) {
  const AlignmentResult t = Pool(results);
  return 100.0 * (t.n_ref - t.substitutions - t.deletions - t.insertions) /
         t.n_ref;
}

}  // namespace tandem
