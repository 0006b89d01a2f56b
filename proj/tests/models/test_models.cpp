#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ctnet/models/checkpoint.hpp"
#include "ctnet/models/fgsm.hpp"
#include "ctnet/models/model.hpp"
#include "ctnet/numerics/errors.hpp"
#include "support/layer_gradcheck.hpp"

using namespace ctnet;
using ctnet::testing::random_tensor;

namespace {

ModelConfig small_config(Architecture arch, std::uint64_t seed = 3) {
  ModelConfig c;
  c.architecture = arch;
  c.window_length = 5;
  c.conv_filters = 4;
  c.recurrent_units = 6;
  c.heads = 2;
  c.d_ff = 7;
  c.seed = seed;
  return c;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ctnet_models_" + name);
}

}  // namespace

TEST(ModelConfig, Validation) {
  ModelConfig c;
  EXPECT_NO_THROW(c.validate());
  c.heads = 3;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(build_model(c), ConfigError);

  ModelConfig zero;
  zero.recurrent_units = 0;
  EXPECT_THROW(zero.validate(), ConfigError);

  ModelConfig valid_pad;
  valid_pad.conv_padding = Padding::valid;
  valid_pad.window_length = 2;
  EXPECT_THROW(valid_pad.validate(), ConfigError);
  valid_pad.window_length = 3;
  EXPECT_NO_THROW(valid_pad.validate());

  ModelConfig same_pad;
  same_pad.window_length = 1;
  EXPECT_NO_THROW(same_pad.validate());

  ModelConfig drop;
  drop.dropout_rate = 1.0;
  EXPECT_THROW(drop.validate(), ConfigError);
}

TEST(ModelConfig, ArchitectureNames) {
  for (Architecture a : all_architectures()) EXPECT_EQ(parse_architecture(to_string(a)), a);
  EXPECT_THROW(parse_architecture("transformer"), ConfigError);
}

TEST(Model, ConvParameterCount) {
  const Model m = build_model(ModelConfig{});
  std::size_t conv = 0;
  for (const auto& p : m.parameters()) {
    if (p.name.rfind("conv.", 0) == 0) conv += p.value->size();
  }
  EXPECT_EQ(conv, 256u);
}

TEST(Model, ParameterNamesPerArchitecture) {
  const auto names = [](Architecture a) {
    std::vector<std::string> out;
    for (const auto& p : build_model(small_config(a)).parameters()) out.push_back(p.name);
    return out;
  };
  EXPECT_EQ(names(Architecture::rnn),
            (std::vector<std::string>{"head.W", "head.b", "rnn.W_h", "rnn.W_x", "rnn.b"}));
  EXPECT_EQ(names(Architecture::gru).size(), 8u);
  EXPECT_EQ(names(Architecture::lstm).size(), 10u);
  const auto hybrid = names(Architecture::convlstmtransnet);
  EXPECT_EQ(hybrid.size(), 2u + 8u + 8u + 4u + 4u + 2u);
  EXPECT_TRUE(std::is_sorted(hybrid.begin(), hybrid.end()));
}

TEST(Model, SameSeedBitIdenticalParameters) {
  for (Architecture a : all_architectures()) {
    const Model m1 = build_model(small_config(a, 9));
    const Model m2 = build_model(small_config(a, 9));
    const Model m3 = build_model(small_config(a, 10));
    const auto p1 = m1.parameters(), p2 = m2.parameters(), p3 = m3.parameters();
    bool any_diff = false;
    for (std::size_t i = 0; i < p1.size(); ++i) {
      EXPECT_EQ(*p1[i].value, *p2[i].value) << p1[i].name;
      any_diff |= !(*p1[i].value == *p3[i].value);
    }
    EXPECT_TRUE(any_diff) << to_string(a);
  }
}

TEST(Model, InitialBiasesZeroAndGainsOne) {
  const Model m = build_model(ModelConfig{});
  for (const auto& p : m.parameters()) {
    const std::string& n = p.name;
    const bool is_gain = n.ends_with(".gamma");
    const bool is_bias = n.ends_with(".beta") || n.ends_with(".bias") ||
                         n.find(".b_") != std::string::npos || n.ends_with(".b");
    if (!is_gain && !is_bias) continue;
    for (double v : p.value->data()) EXPECT_EQ(v, is_gain ? 1.0 : 0.0) << n;
  }
}

TEST(Model, OutputShapeAndDeterminism) {
  Rng rng(1);
  for (Architecture a : all_architectures()) {
    ModelConfig c = small_config(a);
    const Model m = build_model(c);
    const Tensor x = random_tensor({7, c.window_length, 1}, rng, 0, 1);
    const Tensor y1 = forward_predict(m, x);
    EXPECT_EQ(y1.shape(), (Shape{7, 1}));
    EXPECT_EQ(y1, forward_predict(m, x));
    EXPECT_THROW(forward_predict(m, random_tensor({7, c.window_length + 1, 1}, rng)), ShapeError);
  }
}

TEST(Model, TrainingModeUsesDropout) {
  Rng data(2);
  ModelConfig c = small_config(Architecture::convlstmtransnet);
  c.dropout_rate = 0.5;
  const Model m = build_model(c);
  const Tensor x = random_tensor({4, c.window_length, 1}, data);
  Rng r1(7), r2(7);
  const Tensor a = forward_predict(m, x, true, &r1);
  EXPECT_EQ(a, forward_predict(m, x, true, &r2));
  EXPECT_FALSE(a == forward_predict(m, x));
}

TEST(Model, GoldenPrediction) {
  // Default hybrid model, seed 0, on the window 0.1, 0.2, ..., 0.6.
  const Model m = build_model(ModelConfig{});
  Tensor x({1, 6, 1});
  for (std::size_t t = 0; t < 6; ++t) x[t] = 0.1 * static_cast<double>(t + 1);
  EXPECT_NEAR(forward_predict(m, x)[0], -0.57777227098303297, 1e-12);
}

TEST(Model, GradientsMatchFiniteDifferences) {
  Rng rng(41);
  for (Architecture a : all_architectures()) {
    for (auto [batch, window, seed] : {std::tuple{1, 3, 1}, {2, 5, 2}, {3, 4, 3}}) {
      ModelConfig c = small_config(a, seed);
      c.window_length = window;
      Model m = build_model(c);
      for (auto& p : m.parameters())
        for (auto& v : p.value->data()) v = rng.uniform(-0.5, 0.5);
      const GradCheckReport r = ctnet::testing::check_model(
          m, random_tensor({std::size_t(batch), std::size_t(window), 1}, rng, 0, 1), rng);
      EXPECT_TRUE(r.passed) << to_string(a) << " max rel " << r.max_rel_error;
    }
  }
}

// ---- checkpoint ----

TEST(Checkpoint, RoundTripIsPredictionExactAndByteStable) {
  Rng rng(5);
  const ScalerParams scaler{1.25e8, 3.5e9};
  for (Architecture a : all_architectures()) {
    Model m = build_model(small_config(a));
    for (auto& p : m.parameters())
      for (auto& v : p.value->data()) v = rng.normal() / 3.0;
    const auto path = temp_file(to_string(a) + ".json");
    save_checkpoint(m, scaler, path.string());
    const Checkpoint loaded = load_checkpoint(path.string());
    EXPECT_EQ(loaded.model.config(), m.config());
    EXPECT_EQ(loaded.scaler.min, scaler.min);
    EXPECT_EQ(loaded.scaler.max, scaler.max);
    const Tensor x = random_tensor({100, m.config().window_length, 1}, rng, 0, 1);
    const Tensor before = forward_predict(m, x), after = forward_predict(loaded.model, x);
    for (std::size_t i = 0; i < before.size(); ++i) EXPECT_EQ(before[i], after[i]);
    EXPECT_EQ(serialize_checkpoint(loaded.model, loaded.scaler), serialize_checkpoint(m, scaler));
    std::filesystem::remove(path);
  }
}

TEST(Checkpoint, TopLevelKeysInOrder) {
  const std::string text = serialize_checkpoint(build_model(small_config(Architecture::rnn)), {0, 1});
  const auto pos = [&](const char* key) { return text.find(std::string("\"") + key + "\""); };
  EXPECT_LT(pos("format_version"), pos("architecture"));
  EXPECT_LT(pos("architecture"), pos("config"));
  EXPECT_LT(pos("config"), pos("scaler"));
  EXPECT_LT(pos("scaler"), pos("params"));
}

TEST(Checkpoint, TruncatedDocumentIsParseError) {
  const std::string text = serialize_checkpoint(build_model(small_config(Architecture::gru)), {0, 1});
  EXPECT_THROW(parse_checkpoint(text.substr(0, text.size() / 2)), ParseError);
  EXPECT_THROW(parse_checkpoint(""), ParseError);
}

TEST(Checkpoint, RenamedKeyNamesTheParameter) {
  std::string text = serialize_checkpoint(build_model(small_config(Architecture::lstm)), {0, 1});
  const auto at = text.find("\"lstm.W_f\"");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 10, "\"lstm.W_z\"");
  try {
    parse_checkpoint(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("lstm.W_f"), std::string::npos) << e.what();
  }
}

TEST(Checkpoint, ExtraParameterRejected) {
  std::string text = serialize_checkpoint(build_model(small_config(Architecture::rnn)), {0, 1});
  const auto at = text.find("\"params\": {");
  text.insert(at + 11, "\"rnn.extra\": {\"shape\": [1], \"data\": [0.0]},");
  EXPECT_THROW(parse_checkpoint(text), ParseError);
}

TEST(Checkpoint, ShapeMismatchAndVersionRejected) {
  std::string text = serialize_checkpoint(build_model(small_config(Architecture::rnn)), {0, 1});
  std::string bad_shape = text;
  const auto at = bad_shape.find("\"shape\": [6]");
  ASSERT_NE(at, std::string::npos);
  bad_shape.replace(at, 12, "\"shape\": [7]");
  EXPECT_THROW(parse_checkpoint(bad_shape), ParseError);

  std::string bad_version = text;
  bad_version.replace(bad_version.find("\"format_version\": 1"), 19, "\"format_version\": 2");
  EXPECT_THROW(parse_checkpoint(bad_version), ParseError);
}

TEST(Checkpoint, MissingFileIsDataError) {
  EXPECT_THROW(load_checkpoint("/nonexistent/dir/ckpt.json"), DataError);
}

// ---- FGSM ----

TEST(Fgsm, ZeroEpsilonIsIdentity) {
  Rng rng(6);
  const Model m = build_model(small_config(Architecture::convlstmtransnet));
  const Tensor x = random_tensor({4, 5, 1}, rng, 0, 1);
  const Tensor y = random_tensor({4, 1}, rng, 0, 1);
  EXPECT_EQ(fgsm_perturb(m, x, y, 0.0), x);
  EXPECT_THROW(fgsm_perturb(m, x, y, -1e-3), ConfigError);
}

TEST(Fgsm, PerturbationIsSignedEpsilon) {
  Rng rng(7);
  const double eps = 0.01;
  for (Architecture a : all_architectures()) {
    const Model m = build_model(small_config(a));
    const Tensor x = random_tensor({6, 5, 1}, rng, 0, 1);
    const Tensor y = random_tensor({6, 1}, rng, 0, 1);
    const Tensor g = input_gradient(m, x, y).gradient;
    const Tensor xp = fgsm_perturb(m, x, y, eps);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = xp[i] - x[i];
      const double expected = g[i] > 0 ? eps : (g[i] < 0 ? -eps : 0.0);
      EXPECT_NEAR(d, expected, 1e-15);
    }
  }
}

TEST(Fgsm, FirstOrderTaylorResidualIsQuadratic) {
  Rng rng(8);
  const Model m = build_model(small_config(Architecture::convlstmtransnet));
  const Tensor x = random_tensor({8, 5, 1}, rng, 0, 1);
  const Tensor y = random_tensor({8, 1}, rng, 0, 1);
  const InputGradient base = input_gradient(m, x, y);
  double l1 = 0.0;
  for (double v : base.gradient.data()) l1 += std::abs(v);
  const auto residual = [&](double eps) {
    const double loss = input_gradient(m, fgsm_perturb(m, x, y, eps), y).loss;
    return std::abs(loss - base.loss - eps * l1);
  };
  const double ratio = residual(1e-3) / residual(1e-4);
  EXPECT_GE(ratio, 50.0);
  EXPECT_LE(ratio, 200.0);
}
