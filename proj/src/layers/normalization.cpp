#include "ctnet/layers/normalization.hpp"

#include <cmath>

#include "ctnet/numerics/errors.hpp"

namespace ctnet {

LayerNorm::LayerNorm(std::size_t d, double epsilon) : d_(d), epsilon_(epsilon) {
  if (d == 0) throw ConfigError("layer_norm: width must be positive");
  if (!(epsilon > 0.0)) throw ConfigError("layer_norm: epsilon must be positive");
  params_.add("gamma", Tensor({d}, 1.0));
  params_.add("beta", Tensor({d}));
}

Tensor LayerNorm::forward(const Tensor& x, Context& ctx) const {
  if (x.rank() == 0 || x.shape().back() != d_) {
    throw ShapeError("layer_norm: expected [..., " + std::to_string(d_) + "], got " +
                     shape_to_string(x.shape()));
  }
  const std::size_t slices = x.size() / d_;
  const Tensor& gamma = params_.at("gamma");
  const Tensor& beta = params_.at("beta");
  ctx.input_shape = x.shape();
  ctx.normalized = Tensor(x.shape());
  ctx.inv_std.assign(slices, 0.0);
  Tensor out(x.shape());
  for (std::size_t s = 0; s < slices; ++s) {
    const double* src = x.raw() + s * d_;
    double mean = 0.0;
    for (std::size_t j = 0; j < d_; ++j) mean += src[j];
    mean /= static_cast<double>(d_);
    double var = 0.0;
    for (std::size_t j = 0; j < d_; ++j) var += (src[j] - mean) * (src[j] - mean);
    var /= static_cast<double>(d_);
    const double inv = 1.0 / std::sqrt(var + epsilon_);
    ctx.inv_std[s] = inv;
    double* xhat = ctx.normalized.raw() + s * d_;
    double* dst = out.raw() + s * d_;
    for (std::size_t j = 0; j < d_; ++j) {
      xhat[j] = (src[j] - mean) * inv;
      dst[j] = gamma[j] * xhat[j] + beta[j];
    }
  }
  ctx.use.arm();
  return out;
}

LayerGradients LayerNorm::backward(Context& ctx, const Tensor& upstream) const {
  ctx.use.consume("layer_norm");
  if (upstream.shape() != ctx.input_shape) {
    throw ShapeError("layer_norm: upstream shape " + shape_to_string(upstream.shape()) +
                     " does not match output " + shape_to_string(ctx.input_shape));
  }
  const std::size_t slices = upstream.size() / d_;
  const Tensor& gamma = params_.at("gamma");
  const double n = static_cast<double>(d_);
  LayerGradients grads;
  grads.input = Tensor(ctx.input_shape);
  Tensor d_gamma({d_}), d_beta({d_});
  for (std::size_t s = 0; s < slices; ++s) {
    const double* dy = upstream.raw() + s * d_;
    const double* xhat = ctx.normalized.raw() + s * d_;
    double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
    for (std::size_t j = 0; j < d_; ++j) {
      const double dxhat = dy[j] * gamma[j];
      sum_dxhat += dxhat;
      sum_dxhat_xhat += dxhat * xhat[j];
      d_gamma[j] += dy[j] * xhat[j];
      d_beta[j] += dy[j];
    }
    double* dx = grads.input.raw() + s * d_;
    const double inv = ctx.inv_std[s];
    for (std::size_t j = 0; j < d_; ++j) {
      const double dxhat = dy[j] * gamma[j];
      dx[j] = inv / n * (n * dxhat - sum_dxhat - xhat[j] * sum_dxhat_xhat);
    }
  }
  grads.params.emplace("gamma", std::move(d_gamma));
  grads.params.emplace("beta", std::move(d_beta));
  return grads;
}

Dropout::Dropout(double rate) : rate_(rate) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw ConfigError("dropout: rate must lie in [0, 1), got " + std::to_string(rate));
  }
}

Tensor Dropout::forward(const Tensor& x, Context& ctx, const ForwardMode& mode) const {
  ctx.active = mode.training && rate_ > 0.0;
  ctx.use.arm();
  if (!ctx.active) {
    ctx.mask = Tensor();
    return x;
  }
  if (mode.rng == nullptr) throw std::logic_error("dropout: training mode requires an rng");
  const double keep_scale = 1.0 / (1.0 - rate_);
  ctx.mask = Tensor(x.shape());
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double m = mode.rng->uniform() < rate_ ? 0.0 : keep_scale;
    ctx.mask[i] = m;
    out[i] *= m;
  }
  return out;
}

LayerGradients Dropout::backward(Context& ctx, const Tensor& upstream) const {
  ctx.use.consume("dropout");
  LayerGradients grads;
  grads.input = upstream;
  if (ctx.active) {
    if (upstream.shape() != ctx.mask.shape()) {
      throw ShapeError("dropout: upstream shape " + shape_to_string(upstream.shape()) +
                       " does not match mask " + shape_to_string(ctx.mask.shape()));
    }
    for (std::size_t i = 0; i < upstream.size(); ++i) grads.input[i] *= ctx.mask[i];
  }
  return grads;
}

}  // namespace ctnet
