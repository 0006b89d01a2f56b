#pragma once

#include <cstddef>

#include "ctnet/layers/params.hpp"

namespace ctnet {

/// Multi-head scaled dot-product self-attention over [batch, time, d_model].
///
/// Q, K and V are affine projections of the same input ("W_q", "W_k",
/// "W_v" [d_model, d_model] with biases "b_q", "b_k", "b_v"). Head h uses
/// columns [h*d_k, (h+1)*d_k) of each projection, d_k = d_model / heads.
/// The concatenated head outputs pass through "W_o", "b_o". No mask and no
/// positional encoding.
class MultiHeadAttention {
 public:
  struct Context {
    std::size_t batch = 0, time = 0;
    Tensor input;    // [batch*time, d_model]
    Tensor query, key, value;
    Tensor weights;  // [batch, heads, time, time], softmax rows
    Tensor concat;   // [batch*time, d_model]
    SingleUse use;
  };

  MultiHeadAttention(std::size_t d_model, std::size_t heads, Rng& rng);

  Tensor forward(const Tensor& x, Context& ctx) const;
  LayerGradients backward(Context& ctx, const Tensor& upstream) const;

  std::size_t heads() const { return heads_; }
  std::size_t head_dim() const { return d_model_ / heads_; }
  LayerParams& params() { return params_; }
  const LayerParams& params() const { return params_; }

 private:
  std::size_t d_model_, heads_;
  LayerParams params_;
};

/// max(0, xW_1 + b_1) W_2 + b_2 applied identically at every time step.
class PositionWiseFFN {
 public:
  struct Context {
    Shape input_shape;
    Tensor input;   // [rows, d_model]
    Tensor hidden;  // [rows, d_ff], post-ReLU
    SingleUse use;
  };

  PositionWiseFFN(std::size_t d_model, std::size_t d_ff, Rng& rng);

  Tensor forward(const Tensor& x, Context& ctx) const;
  LayerGradients backward(Context& ctx, const Tensor& upstream) const;

  LayerParams& params() { return params_; }
  const LayerParams& params() const { return params_; }

 private:
  std::size_t d_model_, d_ff_;
  LayerParams params_;
};

}  // namespace ctnet
