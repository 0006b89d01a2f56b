#include "ctnet/layers/dense.hpp"

#include "ctnet/numerics/errors.hpp"
#include "ctnet/numerics/ops.hpp"

namespace ctnet {

Dense::Dense(std::size_t d_in, std::size_t d_out, Rng& rng) : d_in_(d_in), d_out_(d_out) {
  if (d_in == 0 || d_out == 0) throw ConfigError("dense: dimensions must be positive");
  params_.add("W", uniform_init({d_in, d_out}, d_in, rng));
  params_.add("b", Tensor({d_out}));
}

Tensor Dense::forward(const Tensor& x, Context& ctx) const {
  if (x.rank() != 2 || x.dim(1) != d_in_) {
    throw ShapeError("dense: expected [batch, " + std::to_string(d_in_) + "], got " +
                     shape_to_string(x.shape()));
  }
  const std::size_t batch = x.dim(0);
  Tensor out({batch, d_out_});
  gemm(false, false, batch, d_out_, d_in_, x.data(), params_.at("W").data(), out.data());
  const Tensor& b = params_.at("b");
  for (std::size_t r = 0; r < batch; ++r)
    for (std::size_t j = 0; j < d_out_; ++j) out.at(r, j) += b[j];
  ctx.input = x;
  ctx.use.arm();
  return out;
}

LayerGradients Dense::backward(Context& ctx, const Tensor& upstream) const {
  ctx.use.consume("dense");
  const std::size_t batch = ctx.input.dim(0);
  if (upstream.shape() != Shape{batch, d_out_}) {
    throw ShapeError("dense: upstream shape " + shape_to_string(upstream.shape()) +
                     " does not match output (" + std::to_string(batch) + "," +
                     std::to_string(d_out_) + ")");
  }
  LayerGradients grads;
  grads.input = Tensor({batch, d_in_});
  gemm(false, true, batch, d_in_, d_out_, upstream.data(), params_.at("W").data(),
       grads.input.data());
  Tensor d_w({d_in_, d_out_});
  gemm(true, false, d_in_, d_out_, batch, ctx.input.data(), upstream.data(), d_w.data());
  Tensor d_b({d_out_});
  for (std::size_t r = 0; r < batch; ++r)
    for (std::size_t j = 0; j < d_out_; ++j) d_b[j] += upstream.at(r, j);
  grads.params.emplace("W", std::move(d_w));
  grads.params.emplace("b", std::move(d_b));
  return grads;
}

Tensor GlobalAvgPool::forward(const Tensor& x, Context& ctx) const {
  if (x.rank() != 3) {
    throw ShapeError("global_avg_pool: expected [batch, time, d], got " +
                     shape_to_string(x.shape()));
  }
  ctx.input_shape = x.shape();
  ctx.use.arm();
  return reduce_mean(x, 1);
}

LayerGradients GlobalAvgPool::backward(Context& ctx, const Tensor& upstream) const {
  ctx.use.consume("global_avg_pool");
  const std::size_t batch = ctx.input_shape[0], time = ctx.input_shape[1],
                    d = ctx.input_shape[2];
  if (upstream.shape() != Shape{batch, d}) {
    throw ShapeError("global_avg_pool: upstream shape " + shape_to_string(upstream.shape()) +
                     " does not match pooled output");
  }
  LayerGradients grads;
  grads.input = Tensor(ctx.input_shape);
  const double share = 1.0 / static_cast<double>(time);
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < time; ++t)
      for (std::size_t j = 0; j < d; ++j) grads.input.at(b, t, j) = upstream.at(b, j) * share;
  return grads;
}

}  // namespace ctnet
