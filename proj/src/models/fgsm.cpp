#include "ctnet/models/fgsm.hpp"

#include <cmath>

#include "ctnet/numerics/errors.hpp"
#include "ctnet/training/loss.hpp"

namespace ctnet {

InputGradient input_gradient(const Model& model, const Tensor& windows, const Tensor& targets) {
  Model::Trace trace;
  const Tensor pred = model.forward(windows, trace, ForwardMode{});
  const LossResult loss = mse_loss(pred, targets);
  InputGradient out;
  out.loss = loss.value;
  out.gradient = model.backward(trace, loss.gradient).input;
  return out;
}

Tensor fgsm_perturb(const Model& model, const Tensor& windows, const Tensor& targets,
                    double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("fgsm: epsilon must be a finite non-negative number");
  }
  const Tensor grad = input_gradient(model, windows, targets).gradient;
  Tensor out = windows;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (grad[i] > 0.0) {
      out[i] += epsilon;
    } else if (grad[i] < 0.0) {
      out[i] -= epsilon;
    }
  }
  return out;
}

}  // namespace ctnet
