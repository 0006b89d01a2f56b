#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ctnet/numerics/tensor.hpp"

namespace ctnet {

/// Supervised pairs from a series: inputs[i] = values[i..i+L-1],
/// targets[i] = values[i+L]. N = len - L.
struct WindowedDataset {
  std::size_t window_length = 0;
  Tensor inputs;   // [N, L, 1]
  Tensor targets;  // [N, 1]
  std::vector<std::int64_t> target_timestamps;

  std::size_t size() const { return targets.rank() ? targets.dim(0) : 0; }
  /// Rows [first, first+count) as a new dataset.
  WindowedDataset slice(std::size_t first, std::size_t count) const;
  /// Rows in the given order.
  WindowedDataset gather(std::span<const std::size_t> rows) const;
};

/// Throws DataError when values.size() <= L or L == 0. `timestamps`, when
/// non-empty, must match `values` in length.
WindowedDataset make_windows(std::span<const double> values, std::size_t window_length,
                             std::span<const std::int64_t> timestamps = {});

}  // namespace ctnet
