// tests/mln-test.cc
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

#include "doctest.h"
#include "tandem/mln.h"
#include "oracles.h"
#include "test-util.h"

namespace tandem {
namespace {

using namespace testing;

TEST_CASE("context window") {
  for (int dim : {25, 39}) {
    Rng rng(dim);
    const Matrix f = testing::RandomMatrix(rng, 10, dim);
    const Matrix c = ContextWindow(f);
    REQUIRE(c.cols() == 3 * dim);
    REQUIRE(c.rows() == 10);
    CHECK(c.row(5).segment(0, dim) == f.row(2));
    CHECK(c.row(5).segment(dim, dim) == f.row(5));
    CHECK(c.row(5).segment(2 * dim, dim) == f.row(8));
    CHECK(c.middleCols(dim, dim) == f);
    CHECK(c.row(0).segment(0, dim) == f.row(0));
    CHECK(c.row(9).segment(2 * dim, dim) == f.row(9));
  }
  Matrix one(1, 2);
  one << 3, 4;
  Matrix expect(1, 6);
  expect << 3, 4, 3, 4, 3, 4;
  CHECK(ContextWindow(one) == expect);
}

TEST_CASE("forward pass") {
  MlnTopology topo{75, {400, 200, 100}, 53};
  const MlnWeights zero = ZeroMlnWeights(topo);
  Rng rng(1);
  const Vector y = Forward(zero, RandomVector(rng, 75));
  REQUIRE(y.size() == 53);
  CHECK(y.isApproxToConstant(0.5));

  MlnWeights toy = ZeroMlnWeights({1, {}, 1});
  toy.layers[0].weights(0, 0) = 1.0;
  Vector x(1);
  x << 0.5;
  CHECK(Forward(toy, x)[0] == doctest::Approx(0.6224593312018546).epsilon(1e-12));

  const MlnWeights w = InitMlnWeights(topo, 9);
  const Matrix batch = testing::RandomMatrix(rng, 6, 75);
  const Matrix yb = ForwardBatch(w, batch);
  for (int i = 0; i < 6; ++i) {
    const Vector row = batch.row(i).transpose();
    CHECK((yb.row(i).transpose() - Forward(w, row)).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(Forward(w, RandomVector(rng, 74)), TandemError);
}

TEST_CASE("Glorot initialization") {
  const MlnTopology topo{20, {30}, 5};
  const MlnWeights w = InitMlnWeights(topo, 4);
  const double a0 = std::sqrt(6.0 / 50), a1 = std::sqrt(6.0 / 35);
  CHECK(w.layers[0].weights.cwiseAbs().maxCoeff() <= a0);
  CHECK(w.layers[1].weights.cwiseAbs().maxCoeff() <= a1);
  CHECK(w.layers[0].bias.isZero(0.0));
  CHECK(InitMlnWeights(topo, 4).Flatten() == w.Flatten());
  CHECK(InitMlnWeights(topo, 5).Flatten() != w.Flatten());
  CHECK(w.Topology().LayerSizes() == std::vector<int>{20, 30, 5});
}

TEST_CASE("gradients match finite differences") {
  const std::vector<MlnTopology> topologies = {
      {2, {3}, 2}, {3, {4, 3}, 2}, {75, {6, 5, 4}, 5}, {117, {5, 4}, 6}, {4, {}, 3}};
  for (MlnLoss loss : {MlnLoss::kSquaredError, MlnLoss::kCrossEntropy}) {
    for (size_t i = 0; i < topologies.size(); ++i) {
      const MlnTopology &topo = topologies[i];
      Rng rng(100 + i);
      MlnWeights w = InitMlnWeights(topo, 200 + i);
      // Nonzero biases so that every parameter is exercised.
      for (auto &layer : w.layers)
        for (int j = 0; j < layer.bias.size(); ++j) layer.bias[j] = rng.Uniform(-0.5, 0.5);
      const Vector x = RandomVector(rng, topo.input_dim);
      const Vector target = OneHot(rng.Below(topo.output_dim), topo.output_dim);
      CAPTURE(i);
      CHECK(MaxGradientError(w, x, target, loss) < 1e-4);
    }
  }
}

TEST_CASE("gradient vanishes when the output equals the target") {
  const MlnWeights w = ZeroMlnWeights({3, {4}, 2});
  Vector x(3);
  x << 0.1, -0.2, 0.3;
  const Vector target = Vector::Constant(2, 0.5);
  for (double g : BackpropGradient(w, x, target).Flatten()) CHECK(g == 0.0);
}

TEST_CASE("a minibatch update uses the summed gradient") {
  const MlnTopology topo{3, {4}, 2};
  const MlnWeights w = InitMlnWeights(topo, 3);
  Rng rng(5);
  const Vector x = RandomVector(rng, 3);
  Matrix inputs(2, 3);
  inputs.row(0) = x.transpose();
  inputs.row(1) = x.transpose();
  MlnTrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.epochs = 1;
  cfg.minibatch = 2;
  const auto result = TrainMln(w, inputs, {1, 1}, cfg);
  const auto g = BackpropGradient(w, x, OneHot(1, 2)).Flatten();
  const auto before = w.Flatten(), after = result.weights.Flatten();
  for (size_t i = 0; i < g.size(); ++i)
    CHECK(after[i] == doctest::Approx(before[i] - 0.1 * 2.0 * g[i]).epsilon(1e-12));
}

TEST_CASE("training") {
  Matrix xor_in(4, 2);
  xor_in << 0, 0, 0, 1, 1, 0, 1, 1;
  const std::vector<int> xor_labels = {0, 1, 1, 0};
  const MlnWeights init = InitMlnWeights({2, {8}, 2}, 7);

  MlnTrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.epochs = 2000;
  cfg.minibatch = 4;
  const auto trained = TrainMln(init, xor_in, xor_labels, cfg);
  REQUIRE(trained.loss_trace.size() == 2000);
  CHECK(trained.loss_trace.back() < trained.loss_trace.front());

  const auto again = TrainMln(init, xor_in, xor_labels, cfg);
  CHECK(again.weights.Flatten() == trained.weights.Flatten());
  CHECK(again.loss_trace == trained.loss_trace);

  cfg.learning_rate = 0.0;
  cfg.epochs = 5;
  const auto frozen = TrainMln(init, xor_in, xor_labels, cfg);
  CHECK(frozen.weights.Flatten() == init.Flatten());
  for (double l : frozen.loss_trace) CHECK(l == frozen.loss_trace.front());

  CHECK_THROWS_AS(TrainMln(init, Matrix(0, 2), {}, cfg), TandemError);
  CHECK_THROWS_AS(TrainMln(init, xor_in, {0, 1, 2, 0}, cfg), TandemError);
  CHECK_THROWS_AS(TrainMln(init, xor_in, {0, 1, 1}, cfg), TandemError);
  CHECK_THROWS_AS(TrainMln(init, Matrix::Zero(4, 3), xor_labels, cfg), TandemError);
}

TEST_CASE("separable classes are learned") {
  // Four Gaussian clusters in 6 dimensions.
  Rng rng(11);
  const int per_class = 60, classes = 4, dim = 6;
  Matrix centers = testing::RandomMatrix(rng, classes, dim, -2.0, 2.0);
  Matrix x(per_class * classes, dim);
  std::vector<int> labels;
  for (int c = 0; c < classes; ++c)
    for (int i = 0; i < per_class; ++i) {
      const int r = c * per_class + i;
      for (int d = 0; d < dim; ++d) x(r, d) = centers(c, d) + 0.3 * rng.Gaussian();
      labels.push_back(c);
    }
  MlnTrainConfig cfg;
  cfg.epochs = 30;
  const auto result = TrainMln(InitMlnWeights({dim, {16}, classes}, 2), x, labels, cfg);
  const Matrix y = ForwardBatch(result.weights, x);
  int correct = 0;
  for (int r = 0; r < y.rows(); ++r) {
    Eigen::Index best;
    y.row(r).maxCoeff(&best);
    correct += best == labels[r];
  }
  CHECK(correct > 0.8 * y.rows());
  CHECK((y.array() > 0.0).all());
  CHECK((y.array() < 1.0).all());
}

TEST_CASE("normalizer and checkpoints") {
  Rng rng(13);
  const Matrix a = testing::RandomMatrix(rng, 30, 5, 2.0, 8.0);
  const Matrix b = testing::RandomMatrix(rng, 20, 5, 2.0, 8.0);
  const InputNormalizer norm = InputNormalizer::Fit({a, b});
  Matrix all(50, 5);
  all << a, b;
  const Matrix z = norm.Apply(all);
  for (int d = 0; d < 5; ++d) {
    CHECK(std::abs(z.col(d).mean()) < 1e-12);
    CHECK(z.col(d).squaredNorm() / 50 == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(norm.Apply(Matrix::Zero(2, 4)), TandemError);

  MlnModel model{InitMlnWeights({15, {7, 3}, 4}, 1), norm, MlnLoss::kCrossEntropy};
  const auto path = (testing::TempDir("mln") / "m.bin").string();
  SaveMln(path, model);
  const MlnModel back = LoadMln(path);
  CHECK(back.weights.Flatten() == model.weights.Flatten());
  CHECK(back.weights.Topology().LayerSizes() == model.weights.Topology().LayerSizes());
  CHECK(back.normalizer.mean == model.normalizer.mean);
  CHECK(back.normalizer.inv_std == model.normalizer.inv_std);
  CHECK(back.loss == MlnLoss::kCrossEntropy);
  CHECK(Posteriors(back, a) == Posteriors(model, a));
  CHECK(Posteriors(model, a).rows() == a.rows());
  CHECK_THROWS_AS(LoadMln(path + ".absent"), TandemError);
}

}  // namespace
}  // namespace tandem
