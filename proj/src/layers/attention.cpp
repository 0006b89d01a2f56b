#include "ctnet/layers/attention.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ctnet/numerics/errors.hpp"
#include "ctnet/numerics/ops.hpp"

namespace ctnet {

namespace {

Tensor affine_rows(const Tensor& x, const Tensor& w, const Tensor& b) {
  const std::size_t rows = x.dim(0), d_in = x.dim(1), d_out = w.dim(1);
  Tensor out({rows, d_out});
  gemm(false, false, rows, d_out, d_in, x.data(), w.data(), out.data());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < d_out; ++j) out.at(r, j) += b[j];
  return out;
}

void accumulate_affine_grads(const Tensor& x, const Tensor& d_out, const Tensor& w,
                             LayerGradients& grads, const char* w_name, const char* b_name,
                             Tensor& d_x) {
  const std::size_t rows = x.dim(0), d_in = x.dim(1), width = w.dim(1);
  Tensor d_w({d_in, width});
  gemm(true, false, d_in, width, rows, x.data(), d_out.data(), d_w.data());
  Tensor d_b({width});
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < width; ++j) d_b[j] += d_out.at(r, j);
  gemm(false, true, rows, d_in, width, d_out.data(), w.data(), d_x.data(), 1.0);
  grads.params.emplace(w_name, std::move(d_w));
  grads.params.emplace(b_name, std::move(d_b));
}

}  // namespace

MultiHeadAttention::MultiHeadAttention(std::size_t d_model, std::size_t heads, Rng& rng)
    : d_model_(d_model), heads_(heads) {
  if (d_model == 0 || heads == 0) throw ConfigError("attention: dimensions must be positive");
  if (d_model % heads != 0) {
    throw ConfigError("attention: d_model " + std::to_string(d_model) +
                      " is not divisible by " + std::to_string(heads) + " heads");
  }
  for (const char* name : {"W_q", "W_k", "W_v", "W_o"})
    params_.add(name, uniform_init({d_model, d_model}, d_model, rng));
  for (const char* name : {"b_q", "b_k", "b_v", "b_o"}) params_.add(name, Tensor({d_model}));
}

Tensor MultiHeadAttention::forward(const Tensor& x, Context& ctx) const {
  if (x.rank() != 3 || x.dim(2) != d_model_) {
    throw ShapeError("attention: expected [batch, time, " + std::to_string(d_model_) +
                     "], got " + shape_to_string(x.shape()));
  }
  const std::size_t batch = x.dim(0), time = x.dim(1), dk = head_dim();
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(dk));

  ctx.batch = batch;
  ctx.time = time;
  ctx.input = x.reshaped({batch * time, d_model_});
  ctx.query = affine_rows(ctx.input, params_.at("W_q"), params_.at("b_q"));
  ctx.key = affine_rows(ctx.input, params_.at("W_k"), params_.at("b_k"));
  ctx.value = affine_rows(ctx.input, params_.at("W_v"), params_.at("b_v"));
  ctx.weights = Tensor({batch, heads_, time, time});
  ctx.concat = Tensor({batch * time, d_model_});

  const Tensor& q = ctx.query;
  const Tensor& k = ctx.key;
  const Tensor& v = ctx.value;
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t hd = 0; hd < heads_; ++hd) {
      const std::size_t col = hd * dk;
      double* weights = ctx.weights.raw() + (b * heads_ + hd) * time * time;
      for (std::size_t i = 0; i < time; ++i) {
        const double* qi = q.raw() + (b * time + i) * d_model_ + col;
        double* row = weights + i * time;
        double peak = -INFINITY;
        for (std::size_t j = 0; j < time; ++j) {
          const double* kj = k.raw() + (b * time + j) * d_model_ + col;
          double s = 0.0;
          for (std::size_t c = 0; c < dk; ++c) s += qi[c] * kj[c];
          row[j] = s * inv_scale;
          peak = std::max(peak, row[j]);
        }
        double total = 0.0;
        for (std::size_t j = 0; j < time; ++j) {
          row[j] = std::exp(row[j] - peak);
          total += row[j];
        }
        for (std::size_t j = 0; j < time; ++j) row[j] /= total;
        double* out = ctx.concat.raw() + (b * time + i) * d_model_ + col;
        for (std::size_t j = 0; j < time; ++j) {
          const double* vj = v.raw() + (b * time + j) * d_model_ + col;
          for (std::size_t c = 0; c < dk; ++c) out[c] += row[j] * vj[c];
        }
      }
    }
  }
  Tensor out = affine_rows(ctx.concat, params_.at("W_o"), params_.at("b_o"));
  ctx.use.arm();
  return std::move(out).reshaped({batch, time, d_model_});
}

LayerGradients MultiHeadAttention::backward(Context& ctx, const Tensor& upstream) const {
  ctx.use.consume("attention");
  const std::size_t batch = ctx.batch, time = ctx.time, dk = head_dim();
  const std::size_t rows = batch * time;
  if (upstream.shape() != Shape{batch, time, d_model_}) {
    throw ShapeError("attention: upstream shape " + shape_to_string(upstream.shape()) +
                     " does not match output");
  }
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(dk));
  const Tensor d_out = upstream.reshaped({rows, d_model_});

  LayerGradients grads;
  Tensor d_concat({rows, d_model_});
  accumulate_affine_grads(ctx.concat, d_out, params_.at("W_o"), grads, "W_o", "b_o", d_concat);

  Tensor d_q({rows, d_model_}), d_k({rows, d_model_}), d_v({rows, d_model_});
  std::vector<double> d_weights(time * time);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t hd = 0; hd < heads_; ++hd) {
      const std::size_t col = hd * dk;
      const double* weights = ctx.weights.raw() + (b * heads_ + hd) * time * time;
      for (std::size_t i = 0; i < time; ++i) {
        const double* doi = d_concat.raw() + (b * time + i) * d_model_ + col;
        for (std::size_t j = 0; j < time; ++j) {
          const double* vj = ctx.value.raw() + (b * time + j) * d_model_ + col;
          double* dvj = d_v.raw() + (b * time + j) * d_model_ + col;
          const double a = weights[i * time + j];
          double s = 0.0;
          for (std::size_t c = 0; c < dk; ++c) {
            s += doi[c] * vj[c];
            dvj[c] += a * doi[c];
          }
          d_weights[i * time + j] = s;
        }
        // Softmax Jacobian-vector product, then the 1/sqrt(d_k) scale.
        double weighted = 0.0;
        for (std::size_t j = 0; j < time; ++j)
          weighted += weights[i * time + j] * d_weights[i * time + j];
        for (std::size_t j = 0; j < time; ++j) {
          d_weights[i * time + j] =
              weights[i * time + j] * (d_weights[i * time + j] - weighted) * inv_scale;
        }
        const double* qi = ctx.query.raw() + (b * time + i) * d_model_ + col;
        double* dqi = d_q.raw() + (b * time + i) * d_model_ + col;
        for (std::size_t j = 0; j < time; ++j) {
          const double ds = d_weights[i * time + j];
          const double* kj = ctx.key.raw() + (b * time + j) * d_model_ + col;
          double* dkj = d_k.raw() + (b * time + j) * d_model_ + col;
          for (std::size_t c = 0; c < dk; ++c) {
            dqi[c] += ds * kj[c];
            dkj[c] += ds * qi[c];
          }
        }
      }
    }
  }

  Tensor d_input({rows, d_model_});
  accumulate_affine_grads(ctx.input, d_q, params_.at("W_q"), grads, "W_q", "b_q", d_input);
  accumulate_affine_grads(ctx.input, d_k, params_.at("W_k"), grads, "W_k", "b_k", d_input);
  accumulate_affine_grads(ctx.input, d_v, params_.at("W_v"), grads, "W_v", "b_v", d_input);
  grads.input = std::move(d_input).reshaped({batch, time, d_model_});
  return grads;
}

PositionWiseFFN::PositionWiseFFN(std::size_t d_model, std::size_t d_ff, Rng& rng)
    : d_model_(d_model), d_ff_(d_ff) {
  if (d_model == 0 || d_ff == 0) throw ConfigError("ffn: dimensions must be positive");
  params_.add("W_1", uniform_init({d_model, d_ff}, d_model, rng));
  params_.add("b_1", Tensor({d_ff}));
  params_.add("W_2", uniform_init({d_ff, d_model}, d_ff, rng));
  params_.add("b_2", Tensor({d_model}));
}

Tensor PositionWiseFFN::forward(const Tensor& x, Context& ctx) const {
  if (x.rank() < 2 || x.shape().back() != d_model_) {
    throw ShapeError("ffn: expected [..., " + std::to_string(d_model_) + "], got " +
                     shape_to_string(x.shape()));
  }
  const std::size_t rows = x.size() / d_model_;
  ctx.input_shape = x.shape();
  ctx.input = x.reshaped({rows, d_model_});
  ctx.hidden = affine_rows(ctx.input, params_.at("W_1"), params_.at("b_1"));
  for (auto& v : ctx.hidden.data()) v = v > 0.0 ? v : 0.0;
  Tensor out = affine_rows(ctx.hidden, params_.at("W_2"), params_.at("b_2"));
  ctx.use.arm();
  return std::move(out).reshaped(x.shape());
}

LayerGradients PositionWiseFFN::backward(Context& ctx, const Tensor& upstream) const {
  ctx.use.consume("ffn");
  if (upstream.shape() != ctx.input_shape) {
    throw ShapeError("ffn: upstream shape " + shape_to_string(upstream.shape()) +
                     " does not match output " + shape_to_string(ctx.input_shape));
  }
  const std::size_t rows = ctx.input.dim(0);
  const Tensor d_out = upstream.reshaped({rows, d_model_});
  LayerGradients grads;
  Tensor d_hidden({rows, d_ff_});
  accumulate_affine_grads(ctx.hidden, d_out, params_.at("W_2"), grads, "W_2", "b_2", d_hidden);
  for (std::size_t i = 0; i < d_hidden.size(); ++i)
    if (ctx.hidden[i] <= 0.0) d_hidden[i] = 0.0;
  Tensor d_input({rows, d_model_});
  accumulate_affine_grads(ctx.input, d_hidden, params_.at("W_1"), grads, "W_1", "b_1", d_input);
  grads.input = std::move(d_input).reshaped(ctx.input_shape);
  return grads;
}

}  // namespace ctnet
