#pragma once

#include "ctnet/numerics/tensor.hpp"

namespace ctnet {

struct LossResult {
  double value = 0.0;
  Tensor gradient;  // d loss / d prediction
};

/// Mean squared error over [batch, 1]; gradient 2(pred - target)/batch.
LossResult mse_loss(const Tensor& prediction, const Tensor& target);

}  // namespace ctnet
