#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ctnet/layers/attention.hpp"
#include "ctnet/layers/normalization.hpp"

namespace ctnet {

/// Post-norm Transformer encoder block:
///   u = LN1(x + Dropout(MHA(x))),  y = LN2(u + Dropout(FFN(u))).
/// Parameter gradients are keyed "<sublayer>.<name>" with sublayers
/// "attn", "ffn", "norm1", "norm2".
class EncoderBlock {
 public:
  struct Context {
    MultiHeadAttention::Context attn;
    Dropout::Context attn_drop;
    LayerNorm::Context norm1;
    PositionWiseFFN::Context ffn;
    Dropout::Context ffn_drop;
    LayerNorm::Context norm2;
  };

  EncoderBlock(std::size_t d_model, std::size_t heads, std::size_t d_ff, double dropout_rate,
               Rng& rng);

  Tensor forward(const Tensor& x, Context& ctx, const ForwardMode& mode) const;
  LayerGradients backward(Context& ctx, const Tensor& upstream) const;

  std::vector<std::pair<std::string, const LayerParams*>> param_groups() const;
  std::vector<std::pair<std::string, LayerParams*>> param_groups();
  const MultiHeadAttention& attention() const { return attn_; }

 private:
  MultiHeadAttention attn_;
  PositionWiseFFN ffn_;
  LayerNorm norm1_, norm2_;
  Dropout attn_drop_, ffn_drop_;
};

}  // namespace ctnet
