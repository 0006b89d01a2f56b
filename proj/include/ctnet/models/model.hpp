#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctnet/layers/conv1d.hpp"
#include "ctnet/layers/dense.hpp"
#include "ctnet/layers/encoder.hpp"
#include "ctnet/layers/recurrent.hpp"

namespace ctnet {

enum class Architecture { rnn, lstm, gru, convlstmtransnet };

std::string to_string(Architecture arch);
/// Accepts "rnn", "lstm", "gru", "convlstmtransnet". Throws ConfigError otherwise.
Architecture parse_architecture(const std::string& name);
const std::vector<Architecture>& all_architectures();

struct ModelConfig {
  Architecture architecture = Architecture::convlstmtransnet;
  std::size_t window_length = 6;
  std::size_t conv_filters = 64;
  std::size_t conv_kernel = 3;
  Padding conv_padding = Padding::same;
  std::size_t recurrent_units = 64;
  std::size_t heads = 4;
  std::size_t d_ff = 128;
  double dropout_rate = 0.1;
  std::uint64_t seed = 0;

  /// Throws ConfigError on non-positive sizes, indivisible heads, a dropout
  /// rate outside [0,1) or a window shorter than the kernel under valid padding.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Parameter tensor addressed by its model-level name, e.g. "lstm.W_f".
struct NamedParam {
  std::string name;
  Tensor* value;
};

struct ConstNamedParam {
  std::string name;
  const Tensor* value;
};

struct ModelGradients {
  Tensor input;
  TensorMap params;
};

/// One of the four forecasting architectures.
///
/// ConvLSTMTransNet: Conv1D(ReLU) -> LSTM(sequence) -> encoder block ->
/// global average pooling -> Dense(1). Baselines: one recurrent layer
/// returning its final state -> Dense(1). Initial parameters are a pure
/// function of `config.seed`.
class Model {
 public:
  struct Trace {
    Conv1D::Context conv;
    LstmLayer::Context lstm;
    EncoderBlock::Context encoder;
    GlobalAvgPool::Context pool;
    RnnLayer::Context rnn;
    GruLayer::Context gru;
    Dense::Context head;
  };

  explicit Model(ModelConfig config);

  const ModelConfig& config() const { return config_; }

  /// Predictions [batch, 1] for windows [batch, L, 1], recording what the
  /// backward pass needs in `trace`.
  Tensor forward(const Tensor& windows, Trace& trace, const ForwardMode& mode) const;
  ModelGradients backward(Trace& trace, const Tensor& upstream) const;

  /// Evaluation-mode forward pass (dropout off, deterministic).
  Tensor predict(const Tensor& windows) const;

  /// All parameters in a fixed order (sorted by name).
  std::vector<NamedParam> parameters();
  std::vector<ConstNamedParam> parameters() const;
  std::size_t parameter_count() const;

 private:
  void check_windows(const Tensor& windows) const;
  std::vector<std::pair<std::string, const LayerParams*>> param_groups() const;

  ModelConfig config_;
  std::optional<Conv1D> conv_;
  std::optional<EncoderBlock> encoder_;
  std::optional<RnnLayer> rnn_;
  std::optional<LstmLayer> lstm_;
  std::optional<GruLayer> gru_;
  std::optional<Dense> head_;
  GlobalAvgPool pool_;
};

Model build_model(const ModelConfig& config);

/// Eval-mode forward pass; throws ShapeError when the window length differs
/// from the model's. `training` enables dropout with the supplied rng.
Tensor forward_predict(const Model& model, const Tensor& windows, bool training = false,
                       Rng* rng = nullptr);

}  // namespace ctnet
