#pragma once

#include <cstddef>

#include "ctnet/layers/params.hpp"

namespace ctnet {

/// Affine map xW + b over [batch, d_in]. Parameters "W" [d_in, d_out], "b" [d_out].
class Dense {
 public:
  struct Context {
    Tensor input;
    SingleUse use;
  };

  Dense(std::size_t d_in, std::size_t d_out, Rng& rng);

  Tensor forward(const Tensor& x, Context& ctx) const;
  LayerGradients backward(Context& ctx, const Tensor& upstream) const;

  LayerParams& params() { return params_; }
  const LayerParams& params() const { return params_; }

 private:
  std::size_t d_in_;
  std::size_t d_out_;
  LayerParams params_;
};

/// Mean over the time axis: [batch, time, d] -> [batch, d].
class GlobalAvgPool {
 public:
  struct Context {
    Shape input_shape;
    SingleUse use;
  };

  Tensor forward(const Tensor& x, Context& ctx) const;
  LayerGradients backward(Context& ctx, const Tensor& upstream) const;
};

}  // namespace ctnet
