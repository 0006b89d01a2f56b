#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ctnet/numerics/errors.hpp"
#include "ctnet/training/adam.hpp"
#include "ctnet/training/loss.hpp"
#include "ctnet/training/trainer.hpp"
#include "support/layer_gradcheck.hpp"

using namespace ctnet;

namespace {

WindowedDataset sine_windows(std::size_t count, std::size_t window, double period = 16.0) {
  std::vector<double> values(count + window);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = 0.5 + 0.4 * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / period);
  }
  return make_windows(values, window);
}

ModelConfig small(Architecture arch, std::size_t window) {
  ModelConfig c;
  c.architecture = arch;
  c.window_length = window;
  c.conv_filters = 8;
  c.recurrent_units = 8;
  c.heads = 2;
  c.d_ff = 16;
  return c;
}

}  // namespace

TEST(MseLoss, Examples) {
  const Tensor t = Tensor::matrix({{1}, {3}});
  EXPECT_EQ(mse_loss(t, t).value, 0.0);
  EXPECT_DOUBLE_EQ(mse_loss(Tensor({2, 1}, 0.0), t).value, 5.0);
  EXPECT_EQ(mse_loss(Tensor::matrix({{2}}), Tensor::matrix({{0}})).gradient, Tensor::matrix({{4}}));
  EXPECT_THROW(mse_loss(Tensor({2, 1}), Tensor({3, 1})), ShapeError);
}

TEST(TrainConfig, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.beta1 = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.learning_rate = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Adam, SingleStepHandCase) {
  Tensor theta = Tensor::scalar(0.0);
  const std::vector<NamedParam> params{{"theta", &theta}};
  AdamState state;
  const TrainConfig cfg;
  adam_step(params, {{"theta", Tensor::scalar(1.0)}}, state, cfg);
  EXPECT_NEAR(theta[0], -1e-3 / (1.0 + 1e-8), 1e-12);
  EXPECT_NEAR(theta[0], -9.99999990e-4, 1e-12);
  EXPECT_EQ(state.t, 1u);
  // Bias-corrected first moment equals the gradient after one step.
  EXPECT_DOUBLE_EQ(state.m.at("theta")[0] / (1.0 - cfg.beta1), 1.0);
  EXPECT_GE(state.v.at("theta")[0], 0.0);
}

TEST(Adam, ZeroGradientLeavesParametersBitIdentical) {
  ctnet::Rng rng(1);
  Tensor w = ctnet::testing::random_tensor({3, 4}, rng);
  const Tensor before = w;
  const std::vector<NamedParam> params{{"w", &w}};
  AdamState state;
  for (int i = 0; i < 5; ++i) adam_step(params, {{"w", Tensor({3, 4}, 0.0)}}, state, TrainConfig{});
  EXPECT_EQ(w, before);
}

TEST(Adam, NonFiniteGradientTouchesNothing) {
  Tensor a = Tensor::vector({1, 2}), b = Tensor::vector({3});
  const std::vector<NamedParam> params{{"a", &a}, {"b", &b}};
  AdamState state;
  const TensorMap grads{{"a", Tensor::vector({0.5, 0.5})},
                        {"b", Tensor::vector({std::numeric_limits<double>::quiet_NaN()})}};
  EXPECT_THROW(adam_step(params, grads, state, TrainConfig{}), NumericError);
  EXPECT_EQ(a, Tensor::vector({1, 2}));
  EXPECT_EQ(b, Tensor::vector({3}));
  EXPECT_EQ(state.t, 0u);
  EXPECT_TRUE(state.m.empty());
  EXPECT_THROW(adam_step(params, {{"a", Tensor::vector({1, 1})}}, state, TrainConfig{}),
               std::invalid_argument);
}

TEST(Adam, BitDeterministic) {
  const auto run = [] {
    Tensor w = Tensor::vector({0.3, -0.7});
    const std::vector<NamedParam> params{{"w", &w}};
    AdamState state;
    for (int i = 0; i < 20; ++i) {
      adam_step(params, {{"w", Tensor::vector({std::sin(w[0]), w[1] * w[1]})}}, state, TrainConfig{});
    }
    return w;
  };
  EXPECT_EQ(run(), run());
}

TEST(Adam, ConvexQuadraticFollowsReferenceTrajectory) {
  Tensor theta = Tensor::scalar(1.0);
  const std::vector<NamedParam> params{{"theta", &theta}};
  AdamState state;
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  // Scalar reference update, written out independently of adam_step.
  double ref = 1.0, m = 0.0, v = 0.0;
  double loss = 1.0;
  std::size_t first_increase = 0;
  for (int step = 1; step <= 100; ++step) {
    const double g = 2.0 * ref;
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    ref -= 0.1 * (m / (1.0 - std::pow(0.9, step))) /
           (std::sqrt(v / (1.0 - std::pow(0.999, step))) + 1e-8);

    adam_step(params, {{"theta", Tensor::scalar(2.0 * theta[0])}}, state, cfg);
    EXPECT_NEAR(theta[0], ref, 1e-12) << "step " << step;
    const double next = theta[0] * theta[0];
    if (next >= loss && first_increase == 0) first_increase = step;
    loss = next;
  }
  // Momentum carries the iterate past the minimum after the descent phase,
  // so strict decrease holds for the first 11 steps only.
  EXPECT_EQ(first_increase, 12u);
  EXPECT_LT(loss, 1e-5);
}

TEST(Train, ZeroEpochsLeavesModelUnchanged) {
  Model m = build_model(small(Architecture::gru, 4));
  const std::string before = [&] {
    std::ostringstream s;
    for (const auto& p : m.parameters()) for (double v : p.value->data()) s << v << ',';
    return s.str();
  }();
  TrainConfig cfg;
  cfg.epochs = 0;
  const TrainResult r = train(m, sine_windows(10, 4), cfg);
  EXPECT_TRUE(r.epoch_losses.empty());
  std::ostringstream after;
  for (const auto& p : m.parameters()) for (double v : p.value->data()) after << v << ',';
  EXPECT_EQ(after.str(), before);
}

TEST(Train, RejectsEmptyOrMismatchedData) {
  Model m = build_model(small(Architecture::rnn, 4));
  EXPECT_THROW(train(m, WindowedDataset{}, TrainConfig{}), DataError);
  EXPECT_THROW(train(m, sine_windows(10, 5), TrainConfig{}), DataError);
}

TEST(Train, SameSeedsSameHistory) {
  const auto run = [] {
    Model m = build_model(small(Architecture::convlstmtransnet, 6));
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 8;
    cfg.seed = 4;
    return train(m, sine_windows(40, 6), cfg).epoch_losses;
  };
  const auto a = run();
  EXPECT_EQ(a.size(), 3u);
  EXPECT_EQ(a, run());
}

TEST(Train, LossMonotoneAfterEpochFiveOnMemorizableData) {
  Model m = build_model(small(Architecture::lstm, 6));
  const WindowedDataset ds = sine_windows(64, 6);
  TrainConfig cfg;
  cfg.epochs = 1500;
  cfg.batch_size = ds.size();
  const TrainResult r = train(m, ds, cfg);
  for (std::size_t e = 5; e < r.epoch_losses.size(); ++e) {
    EXPECT_LE(r.epoch_losses[e], r.epoch_losses[e - 1]) << "epoch " << e + 1;
  }
  EXPECT_LT(mse_loss(predict_dataset(m, ds), ds.targets).value, 1e-3);
}

TEST(Train, PatienceStopsEarly) {
  Model m = build_model(small(Architecture::rnn, 4));
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 0.5;
  cfg.patience = 2;
  const TrainResult r = train(m, sine_windows(32, 4), cfg);
  EXPECT_LT(r.epoch_losses.size(), 200u);
}

TEST(Train, LossHistoryCsv) {
  std::ostringstream out;
  write_loss_history_csv(out, {0.5, 0.25});
  EXPECT_EQ(out.str(), "epoch,mean_train_loss\n1,0.5\n2,0.25\n");
}

TEST(Evaluate, MemorizedConstantSeriesHasZeroError) {
  ModelConfig c = small(Architecture::rnn, 3);
  Model m = build_model(c);
  for (auto& p : m.parameters()) *p.value = Tensor(p.value->shape(), 0.0);
  for (auto& p : m.parameters())
    if (p.name == "head.b") *p.value = Tensor::vector({0.5});
  const ScalerParams scaler{0.0, 2e9};
  const std::vector<double> values(20, 0.5);
  const MetricsReport r = evaluate_model(m, make_windows(values, 3), scaler);
  EXPECT_NEAR(r.mae, 0.0, 1e-9);
  EXPECT_NEAR(r.rmse, 0.0, 1e-9);
  EXPECT_NEAR(r.wape, 0.0, 1e-9);
}

TEST(Evaluate, BpsAndNormalizedSpacesRelateByRange) {
  const Model m = build_model(small(Architecture::gru, 5));
  const WindowedDataset ds = sine_windows(30, 5);
  const ScalerParams scaler{0.0, 7.3e9};
  const EvaluationReport r = evaluate(m, ds, scaler);
  EXPECT_NEAR(r.bps.mae, r.normalized.mae * scaler.range(), 1e-6 * r.bps.mae);
  EXPECT_NEAR(r.bps.rmse, r.normalized.rmse * scaler.range(), 1e-6 * r.bps.rmse);
  EXPECT_NEAR(r.bps.wape, r.normalized.wape, 1e-9);
  for (const MetricsReport& mr : {r.bps, r.normalized}) {
    EXPECT_TRUE(std::isfinite(mr.mae) && mr.mae >= 0);
    EXPECT_TRUE(std::isfinite(mr.rmse) && mr.rmse >= 0);
    EXPECT_TRUE(std::isfinite(mr.wape) && mr.wape >= 0);
  }
  EXPECT_THROW(evaluate_model(m, WindowedDataset{}, scaler), DataError);
}

TEST(Evaluate, InvariantToBatchPartitioning) {
  const Model m = build_model(small(Architecture::convlstmtransnet, 6));
  const WindowedDataset ds = sine_windows(37, 6);
  const ScalerParams scaler{1e8, 5e9};
  const MetricsReport whole = evaluate_model(m, ds, scaler, 1000);
  for (std::size_t batch : {1, 5, 16}) {
    const MetricsReport part = evaluate_model(m, ds, scaler, batch);
    EXPECT_NEAR(part.mae, whole.mae, 1e-12 * whole.mae);
    EXPECT_NEAR(part.rmse, whole.rmse, 1e-12 * whole.rmse);
    EXPECT_NEAR(part.wape, whole.wape, 1e-12 * whole.wape);
  }
}
