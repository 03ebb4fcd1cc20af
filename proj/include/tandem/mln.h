// include/tandem/mln.h
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

#ifndef TANDEM_MLN_H_
#define TANDEM_MLN_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tandem/util.h"

namespace tandem {

inline constexpr int kContextOffset = 3;  // frames t-3, t, t+3

struct MlnTopology {
  int input_dim = 0;
  std::vector<int> hidden = {400, 200, 100};
  int output_dim = 53;

  /// input, hidden..., output.
  std::vector<int> LayerSizes() const;
};

enum class MlnLoss { kSquaredError, kCrossEntropy };

struct MlnLayer {
  Eigen::MatrixXd weights;  // out x in
  Vector bias;              // out
};

/// Sigmoid units on every hidden and output layer. A gradient has the same
/// shape, so it is represented by the same type.
struct MlnWeights {
  std::vector<MlnLayer> layers;

  MlnTopology Topology() const;
  int InputDim() const;
  int OutputDim() const;
  /// All parameters flattened (per layer: weights column-major, then bias).
  std::vector<double> Flatten() const;
  void Unflatten(const std::vector<double> &params);
};

/// Uniform in [-a, a], a = sqrt(6 / (fan_in + fan_out)); biases zero.
MlnWeights InitMlnWeights(const MlnTopology &topology, uint64_t seed);

/// All weights and biases zero.
MlnWeights ZeroMlnWeights(const MlnTopology &topology);

/// Row t = [x(max(t-3,0)) | x(t) | x(min(t+3,T-1))].
Matrix ContextWindow(const Matrix &features);

Vector Forward(const MlnWeights &w, const Vector &input);

/// Batched forward: rows of `inputs` are samples, rows of the result are
/// output vectors.
Matrix ForwardBatch(const MlnWeights &w, const Matrix &inputs);

/// 0.5 * sum (y - t)^2 or the per-output sigmoid cross-entropy.
double SampleLoss(const MlnWeights &w, const Vector &input,
                  const Vector &target, MlnLoss loss = MlnLoss::kSquaredError);

/// Exact gradient of SampleLoss with respect to every weight and bias.
MlnWeights BackpropGradient(const MlnWeights &w, const Vector &input,
                            const Vector &target,
                            MlnLoss loss = MlnLoss::kSquaredError);

struct MlnTrainConfig {
  double learning_rate = 0.05;
  int epochs = 30;
  int minibatch = 16;
  uint64_t seed = 1;
  MlnLoss loss = MlnLoss::kSquaredError;
};

struct MlnTrainResult {
  MlnWeights weights;
  /// Mean per-sample loss over the dataset after each epoch.
  std::vector<double> loss_trace;
};

/// Minibatch gradient descent on one-hot targets; each update subtracts
/// learning_rate times the gradient summed over the minibatch. The sample
/// order is reshuffled every epoch from `seed`. `on_epoch` (optional) sees the
/// weights after each epoch.
MlnTrainResult TrainMln(
    MlnWeights init, const Matrix &inputs, const std::vector<int> &labels,
    const MlnTrainConfig &config,
    const std::function<void(int, const MlnWeights &)> &on_epoch = {});

/// Per-dimension z-normalization of raw features, fitted on training data.
struct InputNormalizer {
  Vector mean;
  Vector inv_std;

  bool Empty() const { return mean.size() == 0; }
  Matrix Apply(const Matrix &features) const;
  static InputNormalizer Fit(const std::vector<Matrix> &features);
};

/// A trained network together with its input normalization.
struct MlnModel {
  MlnWeights weights;
  InputNormalizer normalizer;
  MlnLoss loss = MlnLoss::kSquaredError;
};

/// Normalize, context-window, forward: T x output_dim sigmoid scores.
Matrix Posteriors(const MlnModel &model, const Matrix &features);
Matrix Posteriors(const MlnWeights &w, const Matrix &features);

// Checkpoint: "TMLN", u32 version (1), u32 loss kind, u32 layer-size count,
// u32 sizes..., per layer the row-major out x in weights then the bias as
// float64, then u32 normalizer dim (0 = none), mean[dim], inv_std[dim].
// All little-endian.
void SaveMln(const std::string &path, const MlnModel &model);
MlnModel LoadMln(const std::string &path);

}  // namespace tandem

#endif  // TANDEM_MLN_H_
