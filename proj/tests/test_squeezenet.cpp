#include <gtest/gtest.h>

#include <cmath>

#include "augbench/sign_library.hpp"
#include "augbench/squeezenet.hpp"
#include "test_util.hpp"

using namespace augbench;

namespace {

ClassifierConfig small_config(int classes) {
  ClassifierConfig c;
  c.num_classes = classes;
  c.fire_module_widths = {{4, 8}, {4, 8}, {8, 16}};
  c.stem_channels = 8;
  return c;
}

Dataset five_class_set(int per_class) {
  return make_synthetic_dataset(builtin_library(ShapeFamily::synthetic, 5), ShapeFamily::synthetic, per_class, 0, 21);
}

nn::Tensor<float> random_batch(int n, std::uint64_t seed) {
  nn::Tensor<float> t(n, 3, 64, 64);
  Rng rng(seed);
  for (auto& v : t.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  return t;
}

}  // namespace

TEST(SqueezeNet, OutputLengthPerFamily) {
  ClassifierConfig circular;
  circular.num_classes = kCircularClasses;
  ClassifierConfig triangular;
  triangular.num_classes = kTriangularClasses;
  const auto x = random_batch(2, 1);
  const auto pc = SqueezeNet<float>(circular, 1).probabilities(x);
  const auto pt = SqueezeNet<float>(triangular, 1).probabilities(x);
  ASSERT_EQ(pc.size(), 2u);
  EXPECT_EQ(pc[0].size(), 36u);
  EXPECT_EQ(pt[0].size(), 16u);
}

TEST(SqueezeNet, ProbabilitiesSumToOne) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ClassifierConfig cfg;
    for (const auto& row : SqueezeNet<float>(cfg, seed).probabilities(random_batch(3, seed + 10))) {
      double s = 0.0;
      for (double p : row) {
        EXPECT_GE(p, 0.0);
        s += p;
      }
      EXPECT_NEAR(s, 1.0, 1e-6);
    }
  }
}

TEST(SqueezeNet, RejectsWrongInputShape) {
  SqueezeNet<float> net(small_config(3), 1);
  EXPECT_THROW(net.forward(nn::Tensor<float>(1, 3, 32, 32), nullptr), ValidationError);
  EXPECT_THROW(net.forward(nn::Tensor<float>(1, 1, 64, 64), nullptr), ValidationError);
}

TEST(SqueezeNet, InvalidWidthsRejected) {
  ClassifierConfig c;
  c.fire_module_widths = {{16, 32}, {0, 32}};
  EXPECT_THROW(SqueezeNet<float>(c, 1), ConfigError);
  c.fire_module_widths.clear();
  EXPECT_THROW(SqueezeNet<float>(c, 1), ConfigError);
  c = ClassifierConfig{};
  c.num_classes = 1;
  EXPECT_THROW(SqueezeNet<float>(c, 1), ConfigError);
}

TEST(SqueezeNet, GradientCheckInDouble) {
  ClassifierConfig cfg = small_config(3);
  cfg.fire_module_widths = {{2, 3}, {2, 3}};
  cfg.stem_channels = 4;
  cfg.input_size = 16;
  SqueezeNet<double> net(cfg, 3);
  nn::Tensor<double> x(2, 3, 16, 16);
  Rng rng(4);
  for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
  const std::vector<int> labels{0, 2};
  SqueezeNet<double>::Cache cache;
  const auto logits = net.forward(x, &cache);
  net.backward(nn::softmax_cross_entropy(logits, labels).grad, cache);
  auto params = net.parameters();
  auto f = [&] { return nn::softmax_cross_entropy(net.forward(x, nullptr), labels).value; };
  Rng pick(5);
  const std::size_t total = nn::parameter_count(params);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t flat = pick.below(total);
    std::size_t k = 0;
    while (flat >= params[k]->value.size()) flat -= params[k++]->value.size();
    auto& v = params[k]->value.data[flat];
    const double keep = v;
    v = keep + 1e-6;
    const double up = f();
    v = keep - 1e-6;
    const double down = f();
    v = keep;
    const double numeric = (up - down) / 2e-6;
    const double analytic = params[k]->grad.data[flat];
    EXPECT_LE(std::abs(numeric - analytic), 1e-4 * std::max(std::abs(numeric), std::abs(analytic)) + 1e-8)
        << params[k]->name;
  }
}

TEST(Predict, ArgmaxWithLowestIndexTieBreak) {
  EXPECT_EQ(predict(std::vector<double>{0.1, 0.7, 0.2}), 1);
  EXPECT_EQ(predict(std::vector<double>{0.5, 0.5}), 0);
  EXPECT_EQ(predict(std::vector<double>{0.2, 0.4, 0.4}), 1);
  EXPECT_THROW(predict(std::vector<double>{}), ValidationError);
}

TEST(Predict, InvariantUnderMonotoneTransform) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(7), t(7);
    for (auto& x : v) x = rng.uniform(-3.0, 3.0);
    for (std::size_t k = 0; k < v.size(); ++k) t[k] = std::exp(2.0 * v[k]) + 5.0;
    EXPECT_EQ(predict(v), predict(t));
  }
}

TEST(Predict, BatchKeepsOrder) {
  ClassifierModel m{small_config(4), {}, SqueezeNet<float>(small_config(4), 2), {}};
  std::vector<Image> imgs;
  for (int i = 0; i < 5; ++i) imgs.push_back(testing_util::random_image(64, 64, 30 + i));
  std::vector<const Image*> ptrs;
  for (const auto& im : imgs) ptrs.push_back(&im);
  const auto batch = predict(m, std::span<const Image* const>(ptrs), 2);
  ASSERT_EQ(batch.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(batch[i], predict(m, imgs[i]));
  EXPECT_THROW(predict(m, Image(32, 32, 0.5f)), ValidationError);
}

TEST(Training, OneEpochOnTenSamples) {
  const Dataset d = five_class_set(2);
  ASSERT_EQ(d.size(), 10u);
  TrainHyperparams h;
  h.epochs = 1;
  h.batch_size = 4;
  const auto m = train_classifier(d, small_config(5), h, 1);
  EXPECT_EQ(m.history.loss.size(), 1u);
  EXPECT_EQ(m.history.accuracy.size(), 1u);
  EXPECT_TRUE(std::isfinite(m.history.loss[0]));
}

TEST(Training, EqualSeedsGiveIdenticalRuns) {
  const Dataset d = five_class_set(2);
  TrainHyperparams h;
  h.epochs = 2;
  h.batch_size = 4;
  const auto a = train_classifier(d, small_config(5), h, 7), b = train_classifier(d, small_config(5), h, 7);
  EXPECT_EQ(a.history.loss, b.history.loss);
  EXPECT_EQ(predict(a, d), predict(b, d));
  const auto c = train_classifier(d, small_config(5), h, 8);
  EXPECT_NE(a.history.loss, c.history.loss);
}

TEST(Training, EmptyTrainSplitRejected) {
  Dataset d = make_synthetic_dataset(builtin_library(ShapeFamily::synthetic, 2), ShapeFamily::synthetic, 0, 2, 1);
  EXPECT_THROW(train_classifier(d, small_config(2), TrainHyperparams{}, 1), ValidationError);
}

TEST(Training, LabelOutOfRangeRejected) {
  Dataset d = five_class_set(1);
  EXPECT_THROW(train_classifier(d, small_config(3), TrainHyperparams{}, 1), ValidationError);
}

// First five epochs of the 50-image overfitting run: mean loss falls epoch
// over epoch, with at most one exception.
TEST(Training, LossTrendsDownOnOverfittingSet) {
  const Dataset d = five_class_set(10);
  TrainHyperparams h;
  h.epochs = 5;
  h.learning_rate = 1e-3;
  h.batch_size = 64;
  ClassifierConfig cfg;
  cfg.num_classes = 5;
  const auto m = train_classifier(d, cfg, h, 1);
  int violations = 0;
  for (std::size_t e = 1; e < m.history.loss.size(); ++e) violations += m.history.loss[e] >= m.history.loss[e - 1];
  EXPECT_LE(violations, 1);
  EXPECT_LT(m.history.loss.back(), m.history.loss.front());
}

TEST(Checkpoint, ClassifierRoundTrip) {
  testing_util::TempDir dir("cls_ckpt");
  const Dataset d = five_class_set(2);
  TrainHyperparams h;
  h.epochs = 1;
  h.batch_size = 5;
  const auto m = train_classifier(d, small_config(5), h, 3);
  save_classifier(m, dir / "c.ckpt");
  const auto back = load_classifier(dir / "c.ckpt");
  EXPECT_EQ(back.config.fire_module_widths, m.config.fire_module_widths);
  EXPECT_EQ(back.history.loss, m.history.loss);
  const Image img = testing_util::random_image(64, 64, 4);
  const auto x = detail::classifier_batch({&img});
  EXPECT_EQ(back.network.probabilities(x), m.network.probabilities(x));
  EXPECT_THROW(load_classifier(dir / "missing.ckpt"), IoError);
}
