#include "ctnet/layers/conv1d.hpp"

#include "ctnet/numerics/errors.hpp"
#include "ctnet/numerics/ops.hpp"

namespace ctnet {

Conv1D::Conv1D(std::size_t kernel_size, std::size_t channels_in, std::size_t filters,
               Padding padding, bool relu, Rng& rng)
    : kernel_size_(kernel_size),
      channels_in_(channels_in),
      filters_(filters),
      padding_(padding),
      relu_(relu) {
  if (kernel_size == 0 || channels_in == 0 || filters == 0) {
    throw ConfigError("conv1d: kernel size, channels and filters must be positive");
  }
  params_.add("kernel", uniform_init({kernel_size, channels_in, filters},
                                     kernel_size * channels_in, rng));
  params_.add("bias", Tensor({filters}));
}

std::size_t Conv1D::output_length(std::size_t time) const {
  if (padding_ == Padding::same) return time;
  if (time < kernel_size_) {
    throw ShapeError("conv1d: window of " + std::to_string(time) +
                     " steps is shorter than kernel " + std::to_string(kernel_size_) +
                     " under valid padding");
  }
  return time - kernel_size_ + 1;
}

Tensor Conv1D::forward(const Tensor& x, Context& ctx) const {
  if (x.rank() != 3 || x.dim(2) != channels_in_) {
    throw ShapeError("conv1d: expected [batch, time, " + std::to_string(channels_in_) +
                     "], got " + shape_to_string(x.shape()));
  }
  const std::size_t batch = x.dim(0), time = x.dim(1);
  const std::size_t time_out = output_length(time);
  const std::size_t pad_left = padding_ == Padding::same ? (kernel_size_ - 1) / 2 : 0;
  const std::size_t patch = kernel_size_ * channels_in_;

  Tensor patches({batch * time_out, patch});
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < time_out; ++t) {
      double* row = patches.raw() + (b * time_out + t) * patch;
      for (std::size_t j = 0; j < kernel_size_; ++j) {
        // Source index t + j - pad_left, skipped when it falls in the padding.
        const std::size_t shifted = t + j;
        if (shifted < pad_left || shifted - pad_left >= time) continue;
        const double* src = x.raw() + (b * time + (shifted - pad_left)) * channels_in_;
        for (std::size_t c = 0; c < channels_in_; ++c) row[j * channels_in_ + c] = src[c];
      }
    }
  }

  Tensor out({batch, time_out, filters_});
  const Tensor& kernel = params_.at("kernel");
  const Tensor& bias = params_.at("bias");
  gemm(false, false, batch * time_out, filters_, patch, patches.data(), kernel.data(),
       out.data());
  for (std::size_t r = 0; r < batch * time_out; ++r) {
    double* row = out.raw() + r * filters_;
    for (std::size_t f = 0; f < filters_; ++f) {
      row[f] += bias[f];
      if (relu_ && row[f] < 0.0) row[f] = 0.0;
    }
  }

  ctx.input_shape = x.shape();
  ctx.patches = std::move(patches);
  ctx.output = out;
  ctx.use.arm();
  return out;
}

LayerGradients Conv1D::backward(Context& ctx, const Tensor& upstream) const {
  ctx.use.consume("conv1d");
  if (upstream.shape() != ctx.output.shape()) {
    throw ShapeError("conv1d: upstream shape " + shape_to_string(upstream.shape()) +
                     " does not match output " + shape_to_string(ctx.output.shape()));
  }
  const std::size_t batch = ctx.input_shape[0], time = ctx.input_shape[1];
  const std::size_t time_out = ctx.output.dim(1);
  const std::size_t pad_left = padding_ == Padding::same ? (kernel_size_ - 1) / 2 : 0;
  const std::size_t patch = kernel_size_ * channels_in_;
  const std::size_t rows = batch * time_out;

  Tensor d_pre = upstream;
  if (relu_) {
    for (std::size_t i = 0; i < d_pre.size(); ++i)
      if (ctx.output[i] <= 0.0) d_pre[i] = 0.0;
  }

  LayerGradients grads;
  Tensor d_kernel({kernel_size_, channels_in_, filters_});
  gemm(true, false, patch, filters_, rows, ctx.patches.data(), d_pre.data(), d_kernel.data());
  Tensor d_bias({filters_});
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t f = 0; f < filters_; ++f) d_bias[f] += d_pre[r * filters_ + f];

  Tensor d_patches({rows, patch});
  gemm(false, true, rows, patch, filters_, d_pre.data(), params_.at("kernel").data(),
       d_patches.data());
  Tensor d_input(ctx.input_shape);
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < time_out; ++t) {
      const double* row = d_patches.raw() + (b * time_out + t) * patch;
      for (std::size_t j = 0; j < kernel_size_; ++j) {
        const std::size_t shifted = t + j;
        if (shifted < pad_left || shifted - pad_left >= time) continue;
        double* dst = d_input.raw() + (b * time + (shifted - pad_left)) * channels_in_;
        for (std::size_t c = 0; c < channels_in_; ++c) dst[c] += row[j * channels_in_ + c];
      }
    }
  }

  grads.input = std::move(d_input);
  grads.params.emplace("kernel", std::move(d_kernel));
  grads.params.emplace("bias", std::move(d_bias));
  ctx.patches = Tensor();
  return grads;
}

}  // namespace ctnet
