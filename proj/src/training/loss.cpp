#include "ctnet/training/loss.hpp"

#include "ctnet/numerics/errors.hpp"

namespace ctnet {

LossResult mse_loss(const Tensor& prediction, const Tensor& target) {
  if (prediction.shape() != target.shape()) {
    throw ShapeError("mse_loss: prediction " + shape_to_string(prediction.shape()) +
                     " vs target " + shape_to_string(target.shape()));
  }
  const auto n = static_cast<double>(prediction.size());
  LossResult out;
  out.gradient = Tensor(prediction.shape());
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double diff = prediction[i] - target[i];
    out.value += diff * diff;
    out.gradient[i] = 2.0 * diff / n;
  }
  out.value /= n;
  return out;
}

}  // namespace ctnet
