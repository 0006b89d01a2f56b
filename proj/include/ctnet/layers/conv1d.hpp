#pragma once

#include <cstddef>

#include "ctnet/layers/params.hpp"

namespace ctnet {

enum class Padding { valid, same };

/// Temporal convolution over [batch, time, channels_in] inputs.
///
/// Parameters: "kernel" [k, channels_in, filters] and "bias" [filters].
/// `same` padding adds (k-1)/2 zeros before the sequence and the remainder
/// after it, so the output keeps the input length.
class Conv1D {
 public:
  struct Context {
    Shape input_shape;
    Tensor patches;  // [batch*time_out, k*channels_in]
    Tensor output;
    SingleUse use;
  };

  Conv1D(std::size_t kernel_size, std::size_t channels_in, std::size_t filters, Padding padding,
         bool relu, Rng& rng);

  Tensor forward(const Tensor& x, Context& ctx) const;
  LayerGradients backward(Context& ctx, const Tensor& upstream) const;

  std::size_t output_length(std::size_t time) const;
  LayerParams& params() { return params_; }
  const LayerParams& params() const { return params_; }

 private:
  std::size_t kernel_size_;
  std::size_t channels_in_;
  std::size_t filters_;
  Padding padding_;
  bool relu_;
  LayerParams params_;
};

}  // namespace ctnet
