#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "ctnet/numerics/rng.hpp"
#include "ctnet/numerics/tensor.hpp"

namespace ctnet {

using TensorMap = std::map<std::string, Tensor>;

/// Named parameter tensors of one layer. Names are unique and each shape is
/// fixed at registration; assignment through `set` must keep the shape.
class LayerParams {
 public:
  void add(const std::string& name, Tensor value);
  const Tensor& at(const std::string& name) const;
  Tensor& at(const std::string& name);
  void set(const std::string& name, Tensor value);
  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }

  std::size_t count() const;
  auto begin() { return tensors_.begin(); }
  auto end() { return tensors_.end(); }
  auto begin() const { return tensors_.begin(); }
  auto end() const { return tensors_.end(); }

 private:
  TensorMap tensors_;
};

/// Per-layer input gradient and parameter gradients keyed like LayerParams.
struct LayerGradients {
  Tensor input;
  TensorMap params;
};

/// Training flag plus the generator consumed by stochastic layers.
struct ForwardMode {
  bool training = false;
  Rng* rng = nullptr;
};

/// Uniform in [-sqrt(1/fan_in), sqrt(1/fan_in)].
Tensor uniform_init(Shape shape, std::size_t fan_in, Rng& rng);

/// Tracks single use of a forward context by backward.
class SingleUse {
 public:
  void arm() { armed_ = true; }
  /// Throws std::logic_error if the context was never filled or already consumed.
  void consume(const char* layer);

 private:
  bool armed_ = false;
};

}  // namespace ctnet
