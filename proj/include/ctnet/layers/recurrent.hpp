#pragma once

#include <cstddef>
#include <vector>

#include "ctnet/layers/params.hpp"

namespace ctnet {

/// Optional initial state for a recurrent layer, each tensor [batch, units].
/// Missing tensors mean zeros. `cell` is used by the LSTM only.
struct RecurrentState {
  Tensor hidden;
  Tensor cell;
  bool has_hidden = false;
  bool has_cell = false;
};

/// Elman recurrence h_t = tanh(x_t W_x + h_{t-1} W_h + b).
///
/// Parameters "W_x" [d_in, units], "W_h" [units, units], "b" [units].
/// Input [batch, time, d_in]; output [batch, time, units] when
/// `return_sequence`, otherwise the final state [batch, units].
class RnnLayer {
 public:
  struct Context {
    std::size_t batch = 0, time = 0;
    std::vector<Tensor> inputs;   // per step [batch, d_in]
    std::vector<Tensor> hidden;   // h_0..h_T, [batch, units]
    SingleUse use;
  };

  RnnLayer(std::size_t d_in, std::size_t units, bool return_sequence, Rng& rng);

  Tensor forward(const Tensor& x, Context& ctx, const RecurrentState& initial = {}) const;
  LayerGradients backward(Context& ctx, const Tensor& upstream) const;

  std::size_t units() const { return units_; }
  LayerParams& params() { return params_; }
  const LayerParams& params() const { return params_; }

 private:
  std::size_t d_in_, units_;
  bool return_sequence_;
  LayerParams params_;
};

/// LSTM with every gate acting on the concatenation [h_{t-1}, x_t]:
///   f = sigmoid(z W_f + b_f), i = sigmoid(z W_i + b_i), g = tanh(z W_C + b_C),
///   o = sigmoid(z W_o + b_o), C_t = f*C_{t-1} + i*g, h_t = o*tanh(C_t).
/// Gate weights are [units + d_in, units]; the first `units` rows multiply
/// the previous hidden state.
class LstmLayer {
 public:
  struct Context {
    std::size_t batch = 0, time = 0;
    std::vector<Tensor> concat;     // [batch, units + d_in]
    std::vector<Tensor> gates;      // [batch, 4*units], post-activation f|i|g|o
    std::vector<Tensor> cell;       // C_0..C_T
    std::vector<Tensor> cell_tanh;  // tanh(C_1..C_T)
    Tensor packed_weights;          // [units + d_in, 4*units]
    SingleUse use;
  };

  LstmLayer(std::size_t d_in, std::size_t units, bool return_sequence, Rng& rng);

  Tensor forward(const Tensor& x, Context& ctx, const RecurrentState& initial = {}) const;
  LayerGradients backward(Context& ctx, const Tensor& upstream) const;

  std::size_t units() const { return units_; }
  LayerParams& params() { return params_; }
  const LayerParams& params() const { return params_; }

 private:
  std::size_t d_in_, units_;
  bool return_sequence_;
  LayerParams params_;
};

/// GRU on concatenated inputs:
///   z = sigmoid([h, x] W_z + b_z), r = sigmoid([h, x] W_r + b_r),
///   h~ = tanh([r*h, x] W + b), h_t = (1 - z)*h_{t-1} + z*h~.
class GruLayer {
 public:
  struct Context {
    std::size_t batch = 0, time = 0;
    std::vector<Tensor> hidden;      // h_0..h_T
    std::vector<Tensor> concat;      // [h_{t-1}, x_t]
    std::vector<Tensor> reset_concat;  // [r*h_{t-1}, x_t]
    std::vector<Tensor> update;      // z
    std::vector<Tensor> reset;       // r
    std::vector<Tensor> candidate;   // h~
    SingleUse use;
  };

  GruLayer(std::size_t d_in, std::size_t units, bool return_sequence, Rng& rng);

  Tensor forward(const Tensor& x, Context& ctx, const RecurrentState& initial = {}) const;
  LayerGradients backward(Context& ctx, const Tensor& upstream) const;

  std::size_t units() const { return units_; }
  LayerParams& params() { return params_; }
  const LayerParams& params() const { return params_; }

 private:
  std::size_t d_in_, units_;
  bool return_sequence_;
  LayerParams params_;
};

}  // namespace ctnet
