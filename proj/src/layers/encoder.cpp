#include "ctnet/layers/encoder.hpp"

#include "ctnet/numerics/ops.hpp"

namespace ctnet {

namespace {

void merge_prefixed(TensorMap& into, const std::string& prefix, TensorMap&& from) {
  for (auto& [name, t] : from) into.emplace(prefix + "." + name, std::move(t));
}

}  // namespace

EncoderBlock::EncoderBlock(std::size_t d_model, std::size_t heads, std::size_t d_ff,
                           double dropout_rate, Rng& rng)
    : attn_(d_model, heads, rng),
      ffn_(d_model, d_ff, rng),
      norm1_(d_model),
      norm2_(d_model),
      attn_drop_(dropout_rate),
      ffn_drop_(dropout_rate) {}

Tensor EncoderBlock::forward(const Tensor& x, Context& ctx, const ForwardMode& mode) const {
  Tensor attended = attn_drop_.forward(attn_.forward(x, ctx.attn), ctx.attn_drop, mode);
  Tensor mid = norm1_.forward(add(x, attended), ctx.norm1);
  Tensor fed = ffn_drop_.forward(ffn_.forward(mid, ctx.ffn), ctx.ffn_drop, mode);
  return norm2_.forward(add(mid, fed), ctx.norm2);
}

LayerGradients EncoderBlock::backward(Context& ctx, const Tensor& upstream) const {
  LayerGradients out;
  LayerGradients n2 = norm2_.backward(ctx.norm2, upstream);
  LayerGradients f = ffn_.backward(ctx.ffn, ffn_drop_.backward(ctx.ffn_drop, n2.input).input);
  LayerGradients n1 = norm1_.backward(ctx.norm1, add(n2.input, f.input));
  LayerGradients a =
      attn_.backward(ctx.attn, attn_drop_.backward(ctx.attn_drop, n1.input).input);
  out.input = add(n1.input, a.input);
  merge_prefixed(out.params, "attn", std::move(a.params));
  merge_prefixed(out.params, "ffn", std::move(f.params));
  merge_prefixed(out.params, "norm1", std::move(n1.params));
  merge_prefixed(out.params, "norm2", std::move(n2.params));
  return out;
}

std::vector<std::pair<std::string, const LayerParams*>> EncoderBlock::param_groups() const {
  return {{"attn", &attn_.params()},
          {"ffn", &ffn_.params()},
          {"norm1", &norm1_.params()},
          {"norm2", &norm2_.params()}};
}

std::vector<std::pair<std::string, LayerParams*>> EncoderBlock::param_groups() {
  return {{"attn", &attn_.params()},
          {"ffn", &ffn_.params()},
          {"norm1", &norm1_.params()},
          {"norm2", &norm2_.params()}};
}

}  // namespace ctnet
