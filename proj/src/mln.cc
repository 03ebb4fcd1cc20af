// src/mln.cc
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

#include "tandem/mln.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <span>

namespace tandem {

namespace {

using ColMatrix = Eigen::MatrixXd;

void CheckTopology(const MlnTopology &t) {
  if (t.input_dim <= 0 || t.output_dim <= 0)
    throw TandemError("MLN layer sizes must be positive");
  for (int h : t.hidden)
    if (h <= 0) throw TandemError("MLN layer sizes must be positive");
}

template <typename Derived>
void SigmoidInPlace(Eigen::MatrixBase<Derived> &m) {
  m = m.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

// Activations of every layer for a column batch; acts[0] is the input.
std::vector<ColMatrix> ForwardColumns(const MlnWeights &w, ColMatrix input) {
  std::vector<ColMatrix> acts;
  acts.reserve(w.layers.size() + 1);
  acts.push_back(std::move(input));
  for (const MlnLayer &layer : w.layers) {
    ColMatrix z = layer.weights * acts.back();
    z.colwise() += layer.bias;
    SigmoidInPlace(z);
    acts.push_back(std::move(z));
  }
  return acts;
}

// Output-layer error signal dLoss/dz for a batch.
ColMatrix OutputDelta(const ColMatrix &y, const ColMatrix &target,
                      MlnLoss loss) {
  if (loss == MlnLoss::kCrossEntropy) return y - target;
  return ((y - target).array() * y.array() * (1.0 - y.array())).matrix();
}

double BatchLoss(const ColMatrix &y, const ColMatrix &target, MlnLoss loss) {
  if (loss == MlnLoss::kSquaredError) return 0.5 * (y - target).squaredNorm();
  double total = 0.0;
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const double p = std::clamp(y(i, j), 1e-15, 1.0 - 1e-15);
      total -= target(i, j) * std::log(p) + (1.0 - target(i, j)) * std::log1p(-p);
    }
  return total;
}

// Summed gradient over the batch columns, written into `grad`.
void BackwardColumns(const MlnWeights &w, const std::vector<ColMatrix> &acts,
                     const ColMatrix &target, MlnLoss loss, MlnWeights *grad) {
  const size_t num_layers = w.layers.size();
  grad->layers.resize(num_layers);
  ColMatrix delta = OutputDelta(acts.back(), target, loss);
  for (size_t l = num_layers; l-- > 0;) {
    grad->layers[l].weights.noalias() = delta * acts[l].transpose();
    grad->layers[l].bias = delta.rowwise().sum();
    if (l > 0) {
      ColMatrix back = w.layers[l].weights.transpose() * delta;
      delta = (back.array() * acts[l].array() * (1.0 - acts[l].array())).matrix();
    }
  }
}

void CheckInput(const MlnWeights &w, Eigen::Index dim) {
  if (w.layers.empty()) throw TandemError("MLN has no layers");
  if (dim != w.InputDim())
    throw TandemError("MLN input dimension mismatch: got " +
                      std::to_string(dim) + ", network expects " +
                      std::to_string(w.InputDim()));
}

ColMatrix OneHotColumns(const std::vector<int> &labels,
                        std::span<const int> idx, int dim) {
  ColMatrix t = ColMatrix::Zero(dim, static_cast<Eigen::Index>(idx.size()));
  for (size_t b = 0; b < idx.size(); ++b) t(labels[idx[b]], b) = 1.0;
  return t;
}

ColMatrix GatherColumns(const Matrix &inputs, std::span<const int> idx) {
  ColMatrix x(inputs.cols(), static_cast<Eigen::Index>(idx.size()));
  for (size_t b = 0; b < idx.size(); ++b) x.col(b) = inputs.row(idx[b]).transpose();
  return x;
}

}  // namespace

std::vector<int> MlnTopology::LayerSizes() const {
  std::vector<int> sizes{input_dim};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(output_dim);
  return sizes;
}

MlnTopology MlnWeights::Topology() const {
  MlnTopology t;
  t.hidden.clear();
  if (layers.empty()) return t;
  t.input_dim = static_cast<int>(layers.front().weights.cols());
  for (size_t l = 0; l + 1 < layers.size(); ++l)
    t.hidden.push_back(static_cast<int>(layers[l].weights.rows()));
  t.output_dim = static_cast<int>(layers.back().weights.rows());
  return t;
}

int MlnWeights::InputDim() const {
  return layers.empty() ? 0 : static_cast<int>(layers.front().weights.cols());
}

int MlnWeights::OutputDim() const {
  return layers.empty() ? 0 : static_cast<int>(layers.back().weights.rows());
}

std::vector<double> MlnWeights::Flatten() const {
  std::vector<double> p;
  for (const auto &layer : layers) {
    p.insert(p.end(), layer.weights.data(),
             layer.weights.data() + layer.weights.size());
    p.insert(p.end(), layer.bias.data(), layer.bias.data() + layer.bias.size());
  }
  return p;
}

void MlnWeights::Unflatten(const std::vector<double> &params) {
  size_t pos = 0;
  for (auto &layer : layers) {
    const size_t nw = layer.weights.size(), nb = layer.bias.size();
    if (pos + nw + nb > params.size())
      throw TandemError("Unflatten: parameter vector too short");
    std::copy_n(params.begin() + pos, nw, layer.weights.data());
    pos += nw;
    std::copy_n(params.begin() + pos, nb, layer.bias.data());
    pos += nb;
  }
  if (pos != params.size())
    throw TandemError("Unflatten: parameter vector too long");
}

MlnWeights ZeroMlnWeights(const MlnTopology &topology) {
  CheckTopology(topology);
  const auto sizes = topology.LayerSizes();
  MlnWeights w;
  for (size_t l = 0; l + 1 < sizes.size(); ++l)
    w.layers.push_back({ColMatrix::Zero(sizes[l + 1], sizes[l]),
                        Vector::Zero(sizes[l + 1])});
  return w;
}

MlnWeights InitMlnWeights(const MlnTopology &topology, uint64_t seed) {
  MlnWeights w = ZeroMlnWeights(topology);
  Rng rng(seed);
  for (auto &layer : w.layers) {
    const double a =
        std::sqrt(6.0 / static_cast<double>(layer.weights.rows() +
                                            layer.weights.cols()));
    for (Eigen::Index j = 0; j < layer.weights.cols(); ++j)
      for (Eigen::Index i = 0; i < layer.weights.rows(); ++i)
        layer.weights(i, j) = rng.Uniform(-a, a);
  }
  return w;
}

Matrix ContextWindow(const Matrix &features) {
  const Eigen::Index rows = features.rows(), dim = features.cols();
  Matrix out(rows, 3 * dim);
  for (Eigen::Index t = 0; t < rows; ++t) {
    const Eigen::Index prev = std::max<Eigen::Index>(t - kContextOffset, 0);
    const Eigen::Index next = std::min<Eigen::Index>(t + kContextOffset, rows - 1);
    out.block(t, 0, 1, dim) = features.row(prev);
    out.block(t, dim, 1, dim) = features.row(t);
    out.block(t, 2 * dim, 1, dim) = features.row(next);
  }
  return out;
}

Vector Forward(const MlnWeights &w, const Vector &input) {
  CheckInput(w, input.size());
  return ForwardColumns(w, input).back().col(0);
}

Matrix ForwardBatch(const MlnWeights &w, const Matrix &inputs) {
  CheckInput(w, inputs.cols());
  Matrix out(inputs.rows(), w.OutputDim());
  constexpr Eigen::Index kChunk = 256;
  for (Eigen::Index start = 0; start < inputs.rows(); start += kChunk) {
    const Eigen::Index n = std::min(kChunk, inputs.rows() - start);
    ColMatrix x = inputs.middleRows(start, n).transpose();
    out.middleRows(start, n) = ForwardColumns(w, std::move(x)).back().transpose();
  }
  return out;
}

double SampleLoss(const MlnWeights &w, const Vector &input,
                  const Vector &target, MlnLoss loss) {
  const Vector y = Forward(w, input);
  if (target.size() != y.size())
    throw TandemError("MLN target dimension mismatch");
  return BatchLoss(y, target, loss);
}

MlnWeights BackpropGradient(const MlnWeights &w, const Vector &input,
                            const Vector &target, MlnLoss loss) {
  CheckInput(w, input.size());
  if (target.size() != w.OutputDim())
    throw TandemError("MLN target dimension mismatch: got " +
                      std::to_string(target.size()) + ", network outputs " +
                      std::to_string(w.OutputDim()));
  const auto acts = ForwardColumns(w, input);
  MlnWeights grad;
  BackwardColumns(w, acts, target, loss, &grad);
  return grad;
}

MlnTrainResult TrainMln(
    MlnWeights init, const Matrix &inputs, const std::vector<int> &labels,
    const MlnTrainConfig &config,
    const std::function<void(int, const MlnWeights &)> &on_epoch) {
  if (inputs.rows() == 0) throw TandemError("TrainMln: empty dataset");
  if (static_cast<Eigen::Index>(labels.size()) != inputs.rows())
    throw TandemError("TrainMln: label count does not match input count");
  CheckInput(init, inputs.cols());
  const int out_dim = init.OutputDim();
  for (int label : labels)
    if (label < 0 || label >= out_dim)
      throw TandemError("TrainMln: invalid phoneme id " + std::to_string(label) +
                        " (network has " + std::to_string(out_dim) + " outputs)");
  if (config.minibatch < 1) throw TandemError("TrainMln: minibatch must be >= 1");

  MlnTrainResult result{std::move(init), {}};
  MlnWeights &w = result.weights;
  const int n = static_cast<int>(inputs.rows());
  std::vector<int> order(n);
  std::vector<int> identity(n);
  std::iota(identity.begin(), identity.end(), 0);
  MlnWeights grad;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    order = identity;
    Rng rng(DeriveSeed(config.seed, epoch));
    for (int i = n - 1; i > 0; --i)
      std::swap(order[i], order[rng.Below(static_cast<uint64_t>(i) + 1)]);

    for (int start = 0; start < n; start += config.minibatch) {
      const int len = std::min(config.minibatch, n - start);
      std::span<const int> idx(order.data() + start, len);
      const auto acts = ForwardColumns(w, GatherColumns(inputs, idx));
      BackwardColumns(w, acts, OneHotColumns(labels, idx, out_dim), config.loss,
                      &grad);
      for (size_t l = 0; l < w.layers.size(); ++l) {
        w.layers[l].weights -= config.learning_rate * grad.layers[l].weights;
        w.layers[l].bias -= config.learning_rate * grad.layers[l].bias;
      }
    }

    double total = 0.0;
    constexpr int kEvalChunk = 256;
    for (int start = 0; start < n; start += kEvalChunk) {
      const int len = std::min(kEvalChunk, n - start);
      std::span<const int> idx(identity.data() + start, len);
      const auto acts = ForwardColumns(w, GatherColumns(inputs, idx));
      total += BatchLoss(acts.back(), OneHotColumns(labels, idx, out_dim),
                         config.loss);
    }
    result.loss_trace.push_back(total / n);
    if (on_epoch) on_epoch(epoch, w);
  }
  return result;
}

Matrix InputNormalizer::Apply(const Matrix &features) const {
  if (Empty()) return features;
  if (features.cols() != mean.size())
    throw TandemError("feature dimension " + std::to_string(features.cols()) +
                      " does not match the normalizer (" +
                      std::to_string(mean.size()) + ")");
  Matrix out = features;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() *= inv_std.transpose().array();
  return out;
}

InputNormalizer InputNormalizer::Fit(const std::vector<Matrix> &features) {
  InputNormalizer norm;
  Eigen::Index dim = -1, count = 0;
  for (const auto &m : features) {
    if (m.rows() == 0) continue;
    if (dim < 0) dim = m.cols();
    if (m.cols() != dim) throw TandemError("InputNormalizer: mixed dimensions");
    count += m.rows();
  }
  if (count == 0) throw TandemError("InputNormalizer: no frames");
  Vector sum = Vector::Zero(dim), sum_sq = Vector::Zero(dim);
  for (const auto &m : features) {
    if (m.rows() == 0) continue;
    sum += m.colwise().sum().transpose();
    sum_sq += m.array().square().colwise().sum().matrix().transpose();
  }
  norm.mean = sum / static_cast<double>(count);
  Vector var = sum_sq / static_cast<double>(count) - norm.mean.cwiseProduct(norm.mean);
  norm.inv_std = var.unaryExpr(
      [](double v) { return 1.0 / std::sqrt(std::max(v, 1e-8)); });
  return norm;
}

Matrix Posteriors(const MlnWeights &w, const Matrix &features) {
  if (features.rows() == 0) return Matrix(0, w.OutputDim());
  return ForwardBatch(w, ContextWindow(features));
}

Matrix Posteriors(const MlnModel &model, const Matrix &features) {
  return Posteriors(model.weights, model.normalizer.Apply(features));
}

void SaveMln(const std::string &path, const MlnModel &model) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw TandemError("cannot write " + path);
  WriteMagic(os, "TMLN");
  WriteU32(os, 1);
  WriteU32(os, model.loss == MlnLoss::kSquaredError ? 0 : 1);
  const auto sizes = model.weights.Topology().LayerSizes();
  WriteU32(os, static_cast<uint32_t>(sizes.size()));
  for (int s : sizes) WriteU32(os, static_cast<uint32_t>(s));
  for (const auto &layer : model.weights.layers) {
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j)
        WriteF64(os, layer.weights(i, j));
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) WriteF64(os, layer.bias[i]);
  }
  const auto &norm = model.normalizer;
  WriteU32(os, static_cast<uint32_t>(norm.mean.size()));
  for (Eigen::Index i = 0; i < norm.mean.size(); ++i) WriteF64(os, norm.mean[i]);
  for (Eigen::Index i = 0; i < norm.inv_std.size(); ++i) WriteF64(os, norm.inv_std[i]);
  if (!os) throw TandemError("write failed: " + path);
}

MlnModel LoadMln(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw TandemError("cannot open MLN checkpoint " + path);
  try {
    ExpectMagic(is, "TMLN", path);
    if (ReadU32(is) != 1) throw TandemError(path + ": unsupported MLN version");
    MlnModel model;
    model.loss = ReadU32(is) == 0 ? MlnLoss::kSquaredError : MlnLoss::kCrossEntropy;
    const uint32_t num_sizes = ReadU32(is);
    if (num_sizes < 2 || num_sizes > 64) throw TandemError(path + ": bad topology");
    MlnTopology topo;
    topo.hidden.clear();
    std::vector<int> sizes(num_sizes);
    for (auto &s : sizes) s = static_cast<int>(ReadU32(is));
    topo.input_dim = sizes.front();
    topo.output_dim = sizes.back();
    topo.hidden.assign(sizes.begin() + 1, sizes.end() - 1);
    model.weights = ZeroMlnWeights(topo);
    for (auto &layer : model.weights.layers) {
      for (Eigen::Index i = 0; i < layer.weights.rows(); ++i)
        for (Eigen::Index j = 0; j < layer.weights.cols(); ++j)
          layer.weights(i, j) = ReadF64(is);
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = ReadF64(is);
    }
    const uint32_t norm_dim = ReadU32(is);
    if (norm_dim > 0) {
      model.normalizer.mean.resize(norm_dim);
      model.normalizer.inv_std.resize(norm_dim);
      for (uint32_t i = 0; i < norm_dim; ++i) model.normalizer.mean[i] = ReadF64(is);
      for (uint32_t i = 0; i < norm_dim; ++i) model.normalizer.inv_std[i] = ReadF64(is);
    }
    return model;
  } catch (const TandemError &e) {
    throw TandemError(path + ": " + e.what());
  }
}

}  // namespace tandem
