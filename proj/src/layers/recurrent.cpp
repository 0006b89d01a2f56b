#include "ctnet/layers/recurrent.hpp"

#include <array>
#include <cmath>
#include <string>

#include "ctnet/numerics/errors.hpp"
#include "ctnet/numerics/ops.hpp"

namespace ctnet {

namespace {

void check_input(const Tensor& x, std::size_t d_in, const char* layer) {
  if (x.rank() != 3 || x.dim(2) != d_in) {
    throw ShapeError(std::string(layer) + ": expected [batch, time, " + std::to_string(d_in) +
                     "], got " + shape_to_string(x.shape()));
  }
}

Tensor time_slice(const Tensor& x, std::size_t t) {
  const std::size_t batch = x.dim(0), time = x.dim(1), d = x.dim(2);
  Tensor out({batch, d});
  for (std::size_t b = 0; b < batch; ++b) {
    const double* src = x.raw() + (b * time + t) * d;
    std::copy(src, src + d, out.raw() + b * d);
  }
  return out;
}

void add_time_slice(Tensor& dst, std::size_t t, const Tensor& slice) {
  const std::size_t batch = dst.dim(0), time = dst.dim(1), d = dst.dim(2);
  for (std::size_t b = 0; b < batch; ++b) {
    double* out = dst.raw() + (b * time + t) * d;
    const double* src = slice.raw() + b * d;
    for (std::size_t j = 0; j < d; ++j) out[j] += src[j];
  }
}

Tensor initial_tensor(const Tensor& given, bool present, std::size_t batch, std::size_t units,
                      const char* layer) {
  if (!present) return Tensor({batch, units});
  if (given.shape() != Shape{batch, units}) {
    throw ShapeError(std::string(layer) + ": initial state shape " +
                     shape_to_string(given.shape()) + " does not match (" +
                     std::to_string(batch) + "," + std::to_string(units) + ")");
  }
  return given;
}

/// Writes [left, right] row-wise into a [batch, wl + wr] tensor.
Tensor concat_columns(const Tensor& left, const Tensor& right) {
  const std::size_t batch = left.dim(0), wl = left.dim(1), wr = right.dim(1);
  Tensor out({batch, wl + wr});
  for (std::size_t b = 0; b < batch; ++b) {
    std::copy(left.raw() + b * wl, left.raw() + (b + 1) * wl, out.raw() + b * (wl + wr));
    std::copy(right.raw() + b * wr, right.raw() + (b + 1) * wr,
              out.raw() + b * (wl + wr) + wl);
  }
  return out;
}

/// Copies `width` columns starting at `offset` out of a [batch, n] tensor.
Tensor column_block(const Tensor& src, std::size_t offset, std::size_t width) {
  const std::size_t batch = src.dim(0), n = src.dim(1);
  Tensor out({batch, width});
  for (std::size_t b = 0; b < batch; ++b)
    std::copy(src.raw() + b * n + offset, src.raw() + b * n + offset + width,
              out.raw() + b * width);
  return out;
}

/// Packs equally shaped [rows, units] matrices side by side.
Tensor pack_columns(const std::vector<const Tensor*>& blocks) {
  const std::size_t rows = blocks.front()->dim(0), units = blocks.front()->dim(1);
  const std::size_t width = units * blocks.size();
  Tensor out({rows, width});
  for (std::size_t k = 0; k < blocks.size(); ++k)
    for (std::size_t r = 0; r < rows; ++r)
      std::copy(blocks[k]->raw() + r * units, blocks[k]->raw() + (r + 1) * units,
                out.raw() + r * width + k * units);
  return out;
}

Tensor row_sums(const Tensor& m) {
  const std::size_t rows = m.dim(0), cols = m.dim(1);
  Tensor out({cols});
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out[c] += m.at(r, c);
  return out;
}

Tensor finish_output(const std::vector<Tensor>& hidden, std::size_t batch, std::size_t time,
                     std::size_t units, bool return_sequence) {
  if (!return_sequence) return hidden.back();
  Tensor out({batch, time, units});
  for (std::size_t t = 0; t < time; ++t) {
    const Tensor& h = hidden[t + 1];
    for (std::size_t b = 0; b < batch; ++b)
      std::copy(h.raw() + b * units, h.raw() + (b + 1) * units,
                out.raw() + (b * time + t) * units);
  }
  return out;
}

void check_upstream(const Tensor& upstream, std::size_t batch, std::size_t time,
                    std::size_t units, bool return_sequence, const char* layer) {
  const Shape expected = return_sequence ? Shape{batch, time, units} : Shape{batch, units};
  if (upstream.shape() != expected) {
    throw ShapeError(std::string(layer) + ": upstream shape " +
                     shape_to_string(upstream.shape()) + " does not match output " +
                     shape_to_string(expected));
  }
}

/// Upstream gradient reaching h_t (t is 0-based step index).
void add_step_upstream(Tensor& dh, const Tensor& upstream, std::size_t t, std::size_t time,
                       bool return_sequence) {
  if (return_sequence) {
    const std::size_t batch = dh.dim(0), units = dh.dim(1);
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t j = 0; j < units; ++j) dh.at(b, j) += upstream.at(b, t, j);
  } else if (t + 1 == time) {
    for (std::size_t i = 0; i < dh.size(); ++i) dh[i] += upstream[i];
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// RNN

RnnLayer::RnnLayer(std::size_t d_in, std::size_t units, bool return_sequence, Rng& rng)
    : d_in_(d_in), units_(units), return_sequence_(return_sequence) {
  if (d_in == 0 || units == 0) throw ConfigError("rnn: dimensions must be positive");
  params_.add("W_x", uniform_init({d_in, units}, d_in, rng));
  params_.add("W_h", uniform_init({units, units}, units, rng));
  params_.add("b", Tensor({units}));
}

Tensor RnnLayer::forward(const Tensor& x, Context& ctx, const RecurrentState& initial) const {
  check_input(x, d_in_, "rnn");
  const std::size_t batch = x.dim(0), time = x.dim(1);
  const Tensor& w_x = params_.at("W_x");
  const Tensor& w_h = params_.at("W_h");
  const Tensor& bias = params_.at("b");

  ctx.batch = batch;
  ctx.time = time;
  ctx.inputs.clear();
  ctx.hidden.clear();
  ctx.hidden.push_back(initial_tensor(initial.hidden, initial.has_hidden, batch, units_, "rnn"));
  for (std::size_t t = 0; t < time; ++t) {
    Tensor xt = time_slice(x, t);
    Tensor pre({batch, units_});
    gemm(false, false, batch, units_, d_in_, xt.data(), w_x.data(), pre.data());
    gemm(false, false, batch, units_, units_, ctx.hidden.back().data(), w_h.data(), pre.data(),
         1.0);
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t j = 0; j < units_; ++j) pre.at(b, j) = std::tanh(pre.at(b, j) + bias[j]);
    ctx.inputs.push_back(std::move(xt));
    ctx.hidden.push_back(std::move(pre));
  }
  ctx.use.arm();
  return finish_output(ctx.hidden, batch, time, units_, return_sequence_);
}

LayerGradients RnnLayer::backward(Context& ctx, const Tensor& upstream) const {
  ctx.use.consume("rnn");
  const std::size_t batch = ctx.batch, time = ctx.time;
  check_upstream(upstream, batch, time, units_, return_sequence_, "rnn");
  const Tensor& w_x = params_.at("W_x");
  const Tensor& w_h = params_.at("W_h");

  Tensor d_wx({d_in_, units_}), d_wh({units_, units_}), d_b({units_});
  Tensor d_input({batch, time, d_in_});
  Tensor dh({batch, units_});
  for (std::size_t step = time; step-- > 0;) {
    add_step_upstream(dh, upstream, step, time, return_sequence_);
    const Tensor& h = ctx.hidden[step + 1];
    Tensor da = dh;
    for (std::size_t i = 0; i < da.size(); ++i) da[i] *= 1.0 - h[i] * h[i];
    gemm(true, false, d_in_, units_, batch, ctx.inputs[step].data(), da.data(), d_wx.data(), 1.0);
    gemm(true, false, units_, units_, batch, ctx.hidden[step].data(), da.data(), d_wh.data(),
         1.0);
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t j = 0; j < units_; ++j) d_b[j] += da.at(b, j);
    Tensor dx({batch, d_in_});
    gemm(false, true, batch, d_in_, units_, da.data(), w_x.data(), dx.data());
    add_time_slice(d_input, step, dx);
    gemm(false, true, batch, units_, units_, da.data(), w_h.data(), dh.data());
  }

  LayerGradients grads;
  grads.input = std::move(d_input);
  grads.params.emplace("W_x", std::move(d_wx));
  grads.params.emplace("W_h", std::move(d_wh));
  grads.params.emplace("b", std::move(d_b));
  return grads;
}

// ---------------------------------------------------------------------------
// LSTM

namespace {
constexpr std::array<const char*, 4> kLstmWeights{"W_f", "W_i", "W_C", "W_o"};
constexpr std::array<const char*, 4> kLstmBiases{"b_f", "b_i", "b_C", "b_o"};
}  // namespace

LstmLayer::LstmLayer(std::size_t d_in, std::size_t units, bool return_sequence, Rng& rng)
    : d_in_(d_in), units_(units), return_sequence_(return_sequence) {
  if (d_in == 0 || units == 0) throw ConfigError("lstm: dimensions must be positive");
  for (const char* name : kLstmWeights)
    params_.add(name, uniform_init({units + d_in, units}, units + d_in, rng));
  for (const char* name : kLstmBiases) params_.add(name, Tensor({units}));
}

Tensor LstmLayer::forward(const Tensor& x, Context& ctx, const RecurrentState& initial) const {
  check_input(x, d_in_, "lstm");
  const std::size_t batch = x.dim(0), time = x.dim(1), h = units_;
  const std::size_t width = 4 * h, rows = h + d_in_;

  std::vector<const Tensor*> blocks;
  for (const char* name : kLstmWeights) blocks.push_back(&params_.at(name));
  ctx.packed_weights = pack_columns(blocks);
  std::vector<double> bias(width);
  for (std::size_t k = 0; k < 4; ++k) {
    const Tensor& b = params_.at(kLstmBiases[k]);
    std::copy(b.raw(), b.raw() + h, bias.begin() + static_cast<std::ptrdiff_t>(k * h));
  }

  ctx.batch = batch;
  ctx.time = time;
  ctx.concat.clear();
  ctx.gates.clear();
  ctx.cell.clear();
  ctx.cell_tanh.clear();
  std::vector<Tensor> hidden;
  hidden.push_back(initial_tensor(initial.hidden, initial.has_hidden, batch, h, "lstm"));
  ctx.cell.push_back(initial_tensor(initial.cell, initial.has_cell, batch, h, "lstm"));

  for (std::size_t t = 0; t < time; ++t) {
    Tensor z = concat_columns(hidden.back(), time_slice(x, t));
    Tensor gates({batch, width});
    gemm(false, false, batch, width, rows, z.data(), ctx.packed_weights.data(), gates.data());
    Tensor c({batch, h}), c_tanh({batch, h}), h_new({batch, h});
    const Tensor& c_prev = ctx.cell.back();
    for (std::size_t b = 0; b < batch; ++b) {
      double* g = gates.raw() + b * width;
      for (std::size_t j = 0; j < width; ++j) {
        const double pre = g[j] + bias[j];
        g[j] = (j >= 2 * h && j < 3 * h) ? std::tanh(pre) : sigmoid(pre);
      }
      for (std::size_t j = 0; j < h; ++j) {
        const double f = g[j], i = g[h + j], cand = g[2 * h + j], o = g[3 * h + j];
        const double cv = f * c_prev.at(b, j) + i * cand;
        const double ct = std::tanh(cv);
        c.at(b, j) = cv;
        c_tanh.at(b, j) = ct;
        h_new.at(b, j) = o * ct;
      }
    }
    ctx.concat.push_back(std::move(z));
    ctx.gates.push_back(std::move(gates));
    ctx.cell.push_back(std::move(c));
    ctx.cell_tanh.push_back(std::move(c_tanh));
    hidden.push_back(std::move(h_new));
  }
  ctx.use.arm();
  return finish_output(hidden, batch, time, h, return_sequence_);
}

LayerGradients LstmLayer::backward(Context& ctx, const Tensor& upstream) const {
  ctx.use.consume("lstm");
  const std::size_t batch = ctx.batch, time = ctx.time, h = units_;
  const std::size_t width = 4 * h, rows = h + d_in_;
  check_upstream(upstream, batch, time, h, return_sequence_, "lstm");

  Tensor d_packed({rows, width});
  Tensor d_bias({width});
  Tensor d_input({batch, time, d_in_});
  Tensor dh({batch, h}), dc({batch, h});
  Tensor d_pre({batch, width});
  Tensor dz({batch, rows});

  for (std::size_t step = time; step-- > 0;) {
    add_step_upstream(dh, upstream, step, time, return_sequence_);
    const Tensor& gates = ctx.gates[step];
    const Tensor& c_prev = ctx.cell[step];
    const Tensor& c_tanh = ctx.cell_tanh[step];
    for (std::size_t b = 0; b < batch; ++b) {
      const double* g = gates.raw() + b * width;
      double* dp = d_pre.raw() + b * width;
      for (std::size_t j = 0; j < h; ++j) {
        const double f = g[j], i = g[h + j], cand = g[2 * h + j], o = g[3 * h + j];
        const double ct = c_tanh.at(b, j);
        const double dhv = dh.at(b, j);
        const double dcv = dc.at(b, j) + dhv * o * (1.0 - ct * ct);
        dp[j] = dcv * c_prev.at(b, j) * f * (1.0 - f);
        dp[h + j] = dcv * cand * i * (1.0 - i);
        dp[2 * h + j] = dcv * i * (1.0 - cand * cand);
        dp[3 * h + j] = dhv * ct * o * (1.0 - o);
        dc.at(b, j) = dcv * f;
      }
    }
    gemm(true, false, rows, width, batch, ctx.concat[step].data(), d_pre.data(),
         d_packed.data(), 1.0);
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t j = 0; j < width; ++j) d_bias[j] += d_pre.at(b, j);
    gemm(false, true, batch, rows, width, d_pre.data(), ctx.packed_weights.data(), dz.data());
    dh = column_block(dz, 0, h);
    add_time_slice(d_input, step, column_block(dz, h, d_in_));
  }

  LayerGradients grads;
  grads.input = std::move(d_input);
  for (std::size_t k = 0; k < 4; ++k) {
    Tensor dw({rows, h});
    for (std::size_t r = 0; r < rows; ++r)
      std::copy(d_packed.raw() + r * width + k * h, d_packed.raw() + r * width + (k + 1) * h,
                dw.raw() + r * h);
    grads.params.emplace(kLstmWeights[k], std::move(dw));
    Tensor db({h});
    std::copy(d_bias.raw() + k * h, d_bias.raw() + (k + 1) * h, db.raw());
    grads.params.emplace(kLstmBiases[k], std::move(db));
  }
  ctx.concat.clear();
  ctx.gates.clear();
  return grads;
}

// ---------------------------------------------------------------------------
// GRU

GruLayer::GruLayer(std::size_t d_in, std::size_t units, bool return_sequence, Rng& rng)
    : d_in_(d_in), units_(units), return_sequence_(return_sequence) {
  if (d_in == 0 || units == 0) throw ConfigError("gru: dimensions must be positive");
  for (const char* name : {"W_z", "W_r", "W"})
    params_.add(name, uniform_init({units + d_in, units}, units + d_in, rng));
  for (const char* name : {"b_z", "b_r", "b"}) params_.add(name, Tensor({units}));
}

Tensor GruLayer::forward(const Tensor& x, Context& ctx, const RecurrentState& initial) const {
  check_input(x, d_in_, "gru");
  const std::size_t batch = x.dim(0), time = x.dim(1), h = units_, rows = h + d_in_;
  const Tensor gate_weights = pack_columns({&params_.at("W_z"), &params_.at("W_r")});
  const Tensor& w = params_.at("W");
  const Tensor& b_z = params_.at("b_z");
  const Tensor& b_r = params_.at("b_r");
  const Tensor& b = params_.at("b");

  ctx.batch = batch;
  ctx.time = time;
  ctx.hidden.clear();
  ctx.concat.clear();
  ctx.reset_concat.clear();
  ctx.update.clear();
  ctx.reset.clear();
  ctx.candidate.clear();
  ctx.hidden.push_back(initial_tensor(initial.hidden, initial.has_hidden, batch, h, "gru"));

  for (std::size_t t = 0; t < time; ++t) {
    const Tensor& h_prev = ctx.hidden.back();
    Tensor xt = time_slice(x, t);
    Tensor zcat = concat_columns(h_prev, xt);
    Tensor zr({batch, 2 * h});
    gemm(false, false, batch, 2 * h, rows, zcat.data(), gate_weights.data(), zr.data());
    Tensor z({batch, h}), r({batch, h}), rh({batch, h});
    for (std::size_t bi = 0; bi < batch; ++bi) {
      for (std::size_t j = 0; j < h; ++j) {
        z.at(bi, j) = sigmoid(zr.at(bi, j) + b_z[j]);
        r.at(bi, j) = sigmoid(zr.at(bi, h + j) + b_r[j]);
        rh.at(bi, j) = r.at(bi, j) * h_prev.at(bi, j);
      }
    }
    Tensor rcat = concat_columns(rh, xt);
    Tensor cand({batch, h});
    gemm(false, false, batch, h, rows, rcat.data(), w.data(), cand.data());
    Tensor h_new({batch, h});
    for (std::size_t bi = 0; bi < batch; ++bi) {
      for (std::size_t j = 0; j < h; ++j) {
        const double c = std::tanh(cand.at(bi, j) + b[j]);
        cand.at(bi, j) = c;
        const double zv = z.at(bi, j);
        h_new.at(bi, j) = (1.0 - zv) * h_prev.at(bi, j) + zv * c;
      }
    }
    ctx.concat.push_back(std::move(zcat));
    ctx.reset_concat.push_back(std::move(rcat));
    ctx.update.push_back(std::move(z));
    ctx.reset.push_back(std::move(r));
    ctx.candidate.push_back(std::move(cand));
    ctx.hidden.push_back(std::move(h_new));
  }
  ctx.use.arm();
  return finish_output(ctx.hidden, batch, time, h, return_sequence_);
}

LayerGradients GruLayer::backward(Context& ctx, const Tensor& upstream) const {
  ctx.use.consume("gru");
  const std::size_t batch = ctx.batch, time = ctx.time, h = units_, rows = h + d_in_;
  check_upstream(upstream, batch, time, h, return_sequence_, "gru");
  const Tensor gate_weights = pack_columns({&params_.at("W_z"), &params_.at("W_r")});
  const Tensor& w = params_.at("W");

  Tensor d_gate_weights({rows, 2 * h});
  Tensor d_w({rows, h});
  Tensor d_bz({h}), d_br({h}), d_b({h});
  Tensor d_input({batch, time, d_in_});
  Tensor dh({batch, h});
  Tensor d_cand_pre({batch, h});
  Tensor d_rcat({batch, rows});
  Tensor d_gates({batch, 2 * h});
  Tensor d_zcat({batch, rows});

  for (std::size_t step = time; step-- > 0;) {
    add_step_upstream(dh, upstream, step, time, return_sequence_);
    const Tensor& h_prev = ctx.hidden[step];
    const Tensor& z = ctx.update[step];
    const Tensor& r = ctx.reset[step];
    const Tensor& cand = ctx.candidate[step];

    Tensor dh_prev({batch, h});
    for (std::size_t bi = 0; bi < batch; ++bi) {
      for (std::size_t j = 0; j < h; ++j) {
        const double dhv = dh.at(bi, j), zv = z.at(bi, j), c = cand.at(bi, j);
        d_cand_pre.at(bi, j) = dhv * zv * (1.0 - c * c);
        d_gates.at(bi, j) = dhv * (c - h_prev.at(bi, j)) * zv * (1.0 - zv);
        dh_prev.at(bi, j) = dhv * (1.0 - zv);
      }
    }
    gemm(true, false, rows, h, batch, ctx.reset_concat[step].data(), d_cand_pre.data(),
         d_w.data(), 1.0);
    d_b = add(d_b, row_sums(d_cand_pre));
    gemm(false, true, batch, rows, h, d_cand_pre.data(), w.data(), d_rcat.data());
    Tensor dx = column_block(d_rcat, h, d_in_);
    for (std::size_t bi = 0; bi < batch; ++bi) {
      for (std::size_t j = 0; j < h; ++j) {
        const double d_rh = d_rcat.at(bi, j), rv = r.at(bi, j);
        d_gates.at(bi, h + j) = d_rh * h_prev.at(bi, j) * rv * (1.0 - rv);
        dh_prev.at(bi, j) += d_rh * rv;
      }
    }
    gemm(true, false, rows, 2 * h, batch, ctx.concat[step].data(), d_gates.data(),
         d_gate_weights.data(), 1.0);
    for (std::size_t bi = 0; bi < batch; ++bi) {
      for (std::size_t j = 0; j < h; ++j) {
        d_bz[j] += d_gates.at(bi, j);
        d_br[j] += d_gates.at(bi, h + j);
      }
    }
    gemm(false, true, batch, rows, 2 * h, d_gates.data(), gate_weights.data(), d_zcat.data());
    for (std::size_t bi = 0; bi < batch; ++bi)
      for (std::size_t j = 0; j < h; ++j) dh_prev.at(bi, j) += d_zcat.at(bi, j);
    dx = add(dx, column_block(d_zcat, h, d_in_));
    add_time_slice(d_input, step, dx);
    dh = std::move(dh_prev);
  }

  LayerGradients grads;
  grads.input = std::move(d_input);
  Tensor d_wz({rows, h}), d_wr({rows, h});
  for (std::size_t rr = 0; rr < rows; ++rr) {
    for (std::size_t j = 0; j < h; ++j) {
      d_wz.at(rr, j) = d_gate_weights.at(rr, j);
      d_wr.at(rr, j) = d_gate_weights.at(rr, h + j);
    }
  }
  grads.params.emplace("W_z", std::move(d_wz));
  grads.params.emplace("W_r", std::move(d_wr));
  grads.params.emplace("W", std::move(d_w));
  grads.params.emplace("b_z", std::move(d_bz));
  grads.params.emplace("b_r", std::move(d_br));
  grads.params.emplace("b", std::move(d_b));
  return grads;
}

}  // namespace ctnet
