#include "ctnet/interface/gradient_suite.hpp"

#include <tuple>

#include "ctnet/layers/attention.hpp"
#include "ctnet/layers/conv1d.hpp"
#include "ctnet/layers/dense.hpp"
#include "ctnet/layers/normalization.hpp"
#include "ctnet/layers/recurrent.hpp"

namespace ctnet {

Tensor random_tensor(Shape shape, Rng& rng, double lo, double hi) {
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

void randomize(LayerParams& params, Rng& rng, double scale) {
  for (auto& [name, t] : params)
    for (auto& v : t.data()) v = rng.uniform(-scale, scale);
}

double mse_against(const Tensor& y, const Tensor& target) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - target[i]) * (y[i] - target[i]);
  return s / static_cast<double>(y.size());
}

Tensor mse_upstream(const Tensor& y, const Tensor& target) {
  Tensor g(y.shape());
  for (std::size_t i = 0; i < y.size(); ++i)
    g[i] = 2.0 * (y[i] - target[i]) / static_cast<double>(y.size());
  return g;
}

GradCheckReport check_layer(const std::string& label, const ForwardFn& forward,
                            const ForwardBackwardFn& forward_backward, LayerParams* params,
                            Tensor x, Rng& rng) {
  const Tensor y = forward(x);
  const Tensor target = random_tensor(y.shape(), rng);
  const LayerGradients grads = forward_backward(x, mse_upstream(y, target));

  std::vector<GradCheckTarget> targets;
  targets.push_back({label + ".input", &x, grads.input});
  if (params) {
    for (auto& [name, t] : *params) targets.push_back({label + "." + name, &t, grads.params.at(name)});
  }
  return check_gradients([&] { return mse_against(forward(x), target); }, std::move(targets));
}

GradCheckReport check_model(Model& model, Tensor windows, Rng& rng) {
  const Tensor target = random_tensor({windows.dim(0), 1}, rng);
  Model::Trace trace;
  const Tensor y = model.forward(windows, trace, ForwardMode{});
  const ModelGradients grads = model.backward(trace, mse_upstream(y, target));

  std::vector<GradCheckTarget> targets;
  targets.push_back({"input", &windows, grads.input});
  for (const auto& p : model.parameters()) targets.push_back({p.name, p.value, grads.params.at(p.name)});
  return check_gradients([&] { return mse_against(model.predict(windows), target); },
                         std::move(targets));
}

namespace {

template <typename Layer>
GradCheckReport check_simple(const std::string& label, Layer& layer, LayerParams* params,
                             const Tensor& x, Rng& rng) {
  const auto fwd = [&](const Tensor& in) {
    typename Layer::Context ctx;
    return layer.forward(in, ctx);
  };
  const auto fb = [&](const Tensor& in, const Tensor& up) {
    typename Layer::Context ctx;
    layer.forward(in, ctx);
    return layer.backward(ctx, up);
  };
  return check_layer(label, fwd, fb, params, x, rng);
}

}  // namespace

std::vector<GradientSuiteEntry> run_gradient_suite(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GradientSuiteEntry> out;
  const auto record = [&](const std::string& layer, const Tensor& x, GradCheckReport r) {
    out.push_back({layer, shape_to_string(x.shape()), std::move(r)});
  };

  for (auto [b, t, cin, f, k, pad] : {std::tuple{1, 5, 1, 3, 3, Padding::same},
                                      {2, 6, 2, 4, 2, Padding::valid},
                                      {3, 4, 3, 2, 4, Padding::same}}) {
    Conv1D conv(k, cin, f, pad, true, rng);
    randomize(conv.params(), rng);
    const Tensor x = random_tensor({std::size_t(b), std::size_t(t), std::size_t(cin)}, rng);
    record("conv1d", x, check_simple("conv1d", conv, &conv.params(), x, rng));
  }
  for (auto [b, din, dout] : {std::tuple{1, 1, 1}, {4, 3, 2}, {2, 5, 7}}) {
    Dense dense(din, dout, rng);
    randomize(dense.params(), rng);
    const Tensor x = random_tensor({std::size_t(b), std::size_t(din)}, rng);
    record("dense", x, check_simple("dense", dense, &dense.params(), x, rng));
  }
  const auto recurrent_shapes = {std::tuple{1, 1, 1, 1, false}, {2, 4, 3, 5, true},
                                 {3, 6, 2, 4, false}};
  for (auto [b, t, din, units, seq] : recurrent_shapes) {
    const Tensor x = random_tensor({std::size_t(b), std::size_t(t), std::size_t(din)}, rng);
    RnnLayer rnn(din, units, seq, rng);
    randomize(rnn.params(), rng);
    record("rnn", x, check_simple("rnn", rnn, &rnn.params(), x, rng));
    LstmLayer lstm(din, units, seq, rng);
    randomize(lstm.params(), rng);
    record("lstm", x, check_simple("lstm", lstm, &lstm.params(), x, rng));
    GruLayer gru(din, units, seq, rng);
    randomize(gru.params(), rng);
    record("gru", x, check_simple("gru", gru, &gru.params(), x, rng));
  }
  for (auto [b, t, d, h] : {std::tuple{1, 1, 2, 1}, {2, 3, 4, 2}, {2, 5, 6, 3}}) {
    MultiHeadAttention mha(d, h, rng);
    randomize(mha.params(), rng);
    const Tensor x = random_tensor({std::size_t(b), std::size_t(t), std::size_t(d)}, rng);
    record("multi_head_attention", x,
           check_simple("multi_head_attention", mha, &mha.params(), x, rng));
  }
  for (auto [b, t, d, dff] : {std::tuple{1, 1, 1, 1}, {2, 3, 4, 6}, {3, 2, 5, 3}}) {
    PositionWiseFFN ffn(d, dff, rng);
    randomize(ffn.params(), rng);
    const Tensor x = random_tensor({std::size_t(b), std::size_t(t), std::size_t(d)}, rng);
    record("position_wise_ffn", x, check_simple("position_wise_ffn", ffn, &ffn.params(), x, rng));
  }
  for (const Shape& s : {Shape{1, 2}, Shape{3, 4}, Shape{2, 3, 5}}) {
    LayerNorm ln(s.back());
    randomize(ln.params(), rng, 1.5);
    const Tensor x = random_tensor(s, rng);
    record("layer_norm", x, check_simple("layer_norm", ln, &ln.params(), x, rng));
  }
  for (const Shape& s : {Shape{1, 1, 1}, Shape{2, 5, 3}, Shape{3, 4, 6}}) {
    GlobalAvgPool pool;
    const Tensor x = random_tensor(s, rng);
    record("global_avg_pool", x, check_simple("global_avg_pool", pool, nullptr, x, rng));
  }
  for (auto [b, window, filters, units, heads, dff] :
       {std::tuple{1, 3, 3, 4, 2, 5}, {2, 6, 4, 6, 2, 7}, {3, 4, 2, 6, 3, 4}}) {
    ModelConfig c;
    c.window_length = window;
    c.conv_filters = filters;
    c.recurrent_units = units;
    c.heads = heads;
    c.d_ff = dff;
    c.seed = rng.next_u64();
    Model model = build_model(c);
    for (auto& p : model.parameters())
      for (auto& v : p.value->data()) v = rng.uniform(-0.5, 0.5);
    const Tensor x = random_tensor({std::size_t(b), std::size_t(window), 1}, rng, 0.0, 1.0);
    record("convlstmtransnet", x, check_model(model, x, rng));
  }
  return out;
}

}  // namespace ctnet
