#pragma once

#include "ctnet/models/model.hpp"

namespace ctnet {

struct InputGradient {
  double loss = 0.0;  // eval-mode MSE
  Tensor gradient;    // d loss / d windows, [batch, L, 1]
};

/// Eval-mode MSE of `model` on (windows, targets) and its gradient with
/// respect to the input windows.
InputGradient input_gradient(const Model& model, const Tensor& windows, const Tensor& targets);

/// Fast Gradient Sign Method: x + epsilon * sign(d MSE / d x). Coordinates
/// with an exactly zero gradient are left unchanged.
Tensor fgsm_perturb(const Model& model, const Tensor& windows, const Tensor& targets,
                    double epsilon);

}  // namespace ctnet
