#include "ctnet/models/model.hpp"

#include <algorithm>
#include <utility>

#include "ctnet/numerics/errors.hpp"

namespace ctnet {

std::string to_string(Architecture arch) {
  switch (arch) {
    case Architecture::rnn:
      return "rnn";
    case Architecture::lstm:
      return "lstm";
    case Architecture::gru:
      return "gru";
    case Architecture::convlstmtransnet:
      return "convlstmtransnet";
  }
  return "unknown";
}

Architecture parse_architecture(const std::string& name) {
  for (Architecture arch : all_architectures())
    if (to_string(arch) == name) return arch;
  throw ConfigError("unknown architecture '" + name +
                    "' (expected rnn, lstm, gru or convlstmtransnet)");
}

const std::vector<Architecture>& all_architectures() {
  static const std::vector<Architecture> kAll{Architecture::rnn, Architecture::lstm,
                                              Architecture::gru, Architecture::convlstmtransnet};
  return kAll;
}

void ModelConfig::validate() const {
  if (window_length == 0) throw ConfigError("window_length must be positive");
  if (recurrent_units == 0) throw ConfigError("recurrent_units must be positive");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    throw ConfigError("dropout_rate must lie in [0, 1)");
  if (architecture != Architecture::convlstmtransnet) return;
  if (conv_filters == 0 || conv_kernel == 0 || heads == 0 || d_ff == 0)
    throw ConfigError("conv_filters, conv_kernel, heads and d_ff must be positive");
  if (recurrent_units % heads != 0) {
    throw ConfigError("recurrent_units " + std::to_string(recurrent_units) +
                      " is not divisible by heads " + std::to_string(heads));
  }
  if (conv_padding == Padding::valid && window_length < conv_kernel) {
    throw ConfigError("window_length " + std::to_string(window_length) +
                      " is shorter than conv_kernel " + std::to_string(conv_kernel) +
                      " under valid padding");
  }
}

Model::Model(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  Rng rng(config_.seed);
  const std::size_t units = config_.recurrent_units;
  switch (config_.architecture) {
    case Architecture::convlstmtransnet:
      conv_.emplace(config_.conv_kernel, 1, config_.conv_filters, config_.conv_padding, true,
                    rng);
      lstm_.emplace(config_.conv_filters, units, true, rng);
      encoder_.emplace(units, config_.heads, config_.d_ff, config_.dropout_rate, rng);
      break;
    case Architecture::rnn:
      rnn_.emplace(1, units, false, rng);
      break;
    case Architecture::lstm:
      lstm_.emplace(1, units, false, rng);
      break;
    case Architecture::gru:
      gru_.emplace(1, units, false, rng);
      break;
  }
  head_.emplace(units, 1, rng);
}

void Model::check_windows(const Tensor& windows) const {
  if (windows.rank() != 3 || windows.dim(2) != 1) {
    throw ShapeError("model expects windows [batch, L, 1], got " +
                     shape_to_string(windows.shape()));
  }
  if (windows.dim(1) != config_.window_length) {
    throw ShapeError("window length " + std::to_string(windows.dim(1)) +
                     " does not match model window " + std::to_string(config_.window_length));
  }
}

Tensor Model::forward(const Tensor& windows, Trace& trace, const ForwardMode& mode) const {
  check_windows(windows);
  Tensor features;
  if (config_.architecture == Architecture::convlstmtransnet) {
    Tensor local = conv_->forward(windows, trace.conv);
    Tensor sequence = lstm_->forward(local, trace.lstm);
    Tensor encoded = encoder_->forward(sequence, trace.encoder, mode);
    features = pool_.forward(encoded, trace.pool);
  } else if (rnn_) {
    features = rnn_->forward(windows, trace.rnn);
  } else if (lstm_) {
    features = lstm_->forward(windows, trace.lstm);
  } else {
    features = gru_->forward(windows, trace.gru);
  }
  return head_->forward(features, trace.head);
}

namespace {

void merge_prefixed(TensorMap& into, const std::string& prefix, TensorMap&& from) {
  for (auto& [name, t] : from) into.emplace(prefix + "." + name, std::move(t));
}

}  // namespace

ModelGradients Model::backward(Trace& trace, const Tensor& upstream) const {
  ModelGradients grads;
  LayerGradients head = head_->backward(trace.head, upstream);
  merge_prefixed(grads.params, "head", std::move(head.params));
  if (config_.architecture == Architecture::convlstmtransnet) {
    LayerGradients pooled = pool_.backward(trace.pool, head.input);
    LayerGradients enc = encoder_->backward(trace.encoder, pooled.input);
    LayerGradients seq = lstm_->backward(trace.lstm, enc.input);
    LayerGradients local = conv_->backward(trace.conv, seq.input);
    merge_prefixed(grads.params, "encoder", std::move(enc.params));
    merge_prefixed(grads.params, "lstm", std::move(seq.params));
    merge_prefixed(grads.params, "conv", std::move(local.params));
    grads.input = std::move(local.input);
  } else {
    LayerGradients rec = rnn_   ? rnn_->backward(trace.rnn, head.input)
                         : lstm_ ? lstm_->backward(trace.lstm, head.input)
                                 : gru_->backward(trace.gru, head.input);
    merge_prefixed(grads.params, to_string(config_.architecture), std::move(rec.params));
    grads.input = std::move(rec.input);
  }
  return grads;
}

Tensor Model::predict(const Tensor& windows) const {
  Trace trace;
  return forward(windows, trace, ForwardMode{});
}

std::vector<std::pair<std::string, const LayerParams*>> Model::param_groups() const {
  std::vector<std::pair<std::string, const LayerParams*>> groups;
  if (conv_) groups.emplace_back("conv", &conv_->params());
  if (rnn_) groups.emplace_back("rnn", &rnn_->params());
  if (lstm_) groups.emplace_back("lstm", &lstm_->params());
  if (gru_) groups.emplace_back("gru", &gru_->params());
  if (encoder_) {
    for (auto& [prefix, params] : encoder_->param_groups())
      groups.emplace_back("encoder." + prefix, params);
  }
  groups.emplace_back("head", &head_->params());
  return groups;
}

std::vector<ConstNamedParam> Model::parameters() const {
  std::vector<ConstNamedParam> out;
  for (const auto& [prefix, params] : param_groups())
    for (const auto& [name, tensor] : *params) out.push_back({prefix + "." + name, &tensor});
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  return out;
}

std::vector<NamedParam> Model::parameters() {
  std::vector<NamedParam> out;
  for (const auto& p : std::as_const(*this).parameters())
    out.push_back({p.name, const_cast<Tensor*>(p.value)});
  return out;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : parameters()) n += p.value->size();
  return n;
}

Model build_model(const ModelConfig& config) { return Model(config); }

Tensor forward_predict(const Model& model, const Tensor& windows, bool training, Rng* rng) {
  if (!training) return model.predict(windows);
  Model::Trace trace;
  return model.forward(windows, trace, ForwardMode{true, rng});
}

}  // namespace ctnet
