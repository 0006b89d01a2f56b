#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ctnet/layers/params.hpp"
#include "ctnet/models/model.hpp"
#include "ctnet/numerics/gradcheck.hpp"

namespace ctnet {

/// Uniform noise tensor in [lo, hi).
Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0);

/// Replaces every parameter with uniform noise in [-scale, scale) so zero
/// biases and unit gains cannot hide gradient errors.
void randomize(LayerParams& params, Rng& rng, double scale = 0.5);

/// mean((y - target)^2) and its gradient with respect to y.
double mse_against(const Tensor& y, const Tensor& target);
Tensor mse_upstream(const Tensor& y, const Tensor& target);

using ForwardFn = std::function<Tensor(const Tensor&)>;
using ForwardBackwardFn = std::function<LayerGradients(const Tensor&, const Tensor&)>;

/// Finite-difference check of one layer against an MSE objective with a
/// random target. `forward` runs a fresh forward pass; `forward_backward`
/// runs forward then backward with the given upstream gradient. `params`
/// may be null for parameter-free layers; report names are prefixed with
/// `label`.
GradCheckReport check_layer(const std::string& label, const ForwardFn& forward,
                            const ForwardBackwardFn& forward_backward, LayerParams* params,
                            Tensor x, Rng& rng);

/// Same check for a whole model in evaluation mode, against [batch, 1] targets.
GradCheckReport check_model(Model& model, Tensor windows, Rng& rng);

struct GradientSuiteEntry {
  std::string layer;  // e.g. "lstm", "multi_head_attention", "convlstmtransnet"
  std::string shape;  // input shape checked
  GradCheckReport report;
};

/// Every layer type plus the assembled hybrid model, each on several random
/// small shapes with randomized parameters.
std::vector<GradientSuiteEntry> run_gradient_suite(std::uint64_t seed);

}  // namespace ctnet
