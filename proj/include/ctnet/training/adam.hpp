#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "ctnet/layers/params.hpp"
#include "ctnet/models/model.hpp"

namespace ctnet {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;
  std::size_t batch_size = 32;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  bool shuffle_each_epoch = true;
  /// Stop after this many epochs without a lower mean training loss; 0 disables.
  std::size_t patience = 0;

  void validate() const;
};

/// First and second moment estimates per parameter name plus the step count.
struct AdamState {
  TensorMap m;
  TensorMap v;
  std::uint64_t t = 0;
};

/// One bias-corrected Adam update. Every parameter needs a same-shaped
/// gradient. A non-finite gradient raises NumericError before anything
/// is modified.
void adam_step(std::span<const NamedParam> params, const TensorMap& grads, AdamState& state,
               const TrainConfig& cfg);

}  // namespace ctnet
