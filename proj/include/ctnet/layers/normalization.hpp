#pragma once

#include <cstddef>
#include <vector>

#include "ctnet/layers/params.hpp"

namespace ctnet {

/// Standardizes each last-axis slice with its population variance
/// (epsilon inside the square root), then applies "gamma" and "beta".
class LayerNorm {
 public:
  struct Context {
    Shape input_shape;
    Tensor normalized;             // x_hat, same shape as the input
    std::vector<double> inv_std;   // one per slice
    SingleUse use;
  };

  LayerNorm(std::size_t d, double epsilon = 1e-5);

  Tensor forward(const Tensor& x, Context& ctx) const;
  LayerGradients backward(Context& ctx, const Tensor& upstream) const;

  double epsilon() const { return epsilon_; }
  LayerParams& params() { return params_; }
  const LayerParams& params() const { return params_; }

 private:
  std::size_t d_;
  double epsilon_;
  LayerParams params_;
};

/// Inverted dropout: in training each element is zeroed with probability
/// `rate` and survivors are scaled by 1/(1-rate); evaluation is identity.
class Dropout {
 public:
  struct Context {
    bool active = false;
    Tensor mask;  // 0 or 1/(1-rate) per element when active
    SingleUse use;
  };

  explicit Dropout(double rate);

  Tensor forward(const Tensor& x, Context& ctx, const ForwardMode& mode) const;
  LayerGradients backward(Context& ctx, const Tensor& upstream) const;

  double rate() const { return rate_; }

 private:
  double rate_;
};

}  // namespace ctnet
