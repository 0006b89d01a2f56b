#include "ctnet/training/adam.hpp"

#include <cmath>

#include "ctnet/numerics/errors.hpp"

namespace ctnet {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("beta2 must lie in (0, 1)");
  if (!(eps_adam > 0.0)) throw ConfigError("eps_adam must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
}

void adam_step(std::span<const NamedParam> params, const TensorMap& grads, AdamState& state,
               const TrainConfig& cfg) {
  for (const auto& p : params) {
    auto it = grads.find(p.name);
    if (it == grads.end()) throw ConfigError("adam: no gradient for '" + p.name + "'");
    if (it->second.shape() != p.value->shape()) {
      throw ShapeError("adam: gradient for '" + p.name + "' has shape " +
                       shape_to_string(it->second.shape()) + ", parameter has " +
                       shape_to_string(p.value->shape()));
    }
    if (!it->second.all_finite()) {
      throw NumericError("adam: non-finite gradient for '" + p.name + "'");
    }
  }

  state.t += 1;
  const auto t = static_cast<double>(state.t);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  for (const auto& p : params) {
    const Tensor& g = grads.at(p.name);
    Tensor& m = state.m.try_emplace(p.name, g.shape()).first->second;
    Tensor& v = state.v.try_emplace(p.name, g.shape()).first->second;
    Tensor& theta = *p.value;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      theta[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.eps_adam);
    }
  }
}

}  // namespace ctnet
