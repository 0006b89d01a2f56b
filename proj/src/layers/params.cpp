#include "ctnet/layers/params.hpp"

#include <cmath>
#include <stdexcept>

#include "ctnet/numerics/errors.hpp"

namespace ctnet {

void LayerParams::add(const std::string& name, Tensor value) {
  if (!tensors_.emplace(name, std::move(value)).second) {
    throw ConfigError("duplicate parameter name '" + name + "'");
  }
}

const Tensor& LayerParams::at(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return it->second;
}

Tensor& LayerParams::at(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ConfigError("unknown parameter '" + name + "'");
  return it->second;
}

void LayerParams::set(const std::string& name, Tensor value) {
  Tensor& slot = at(name);
  if (slot.shape() != value.shape()) {
    throw ShapeError("parameter '" + name + "' has shape " + shape_to_string(slot.shape()) +
                     ", got " + shape_to_string(value.shape()));
  }
  slot = std::move(value);
}

std::size_t LayerParams::count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : tensors_) n += t.size();
  return n;
}

Tensor uniform_init(Shape shape, std::size_t fan_in, Rng& rng) {
  Tensor t(std::move(shape));
  const double limit = std::sqrt(1.0 / static_cast<double>(fan_in));
  for (auto& v : t.data()) v = rng.uniform(-limit, limit);
  return t;
}

void SingleUse::consume(const char* layer) {
  if (!armed_) {
    throw std::logic_error(std::string(layer) +
                           ": backward called without a fresh forward context");
  }
  armed_ = false;
}

}  // namespace ctnet
