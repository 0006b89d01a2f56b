#pragma once

#include <cstddef>
#include <span>

namespace ctnet {

/// MAE and RMSE in the units of the inputs; WAPE in percent.
struct MetricsReport {
  double mae = 0.0;
  double rmse = 0.0;
  double wape = 0.0;
  std::size_t n = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// MAE = mean|p-o|, RMSE = sqrt(mean (p-o)^2), WAPE = sum|p-o| / sum|o| * 100.
/// Throws DataError on empty or unequal inputs and when every actual is 0.
MetricsReport compute_metrics(std::span<const double> predicted, std::span<const double> actual);

}  // namespace ctnet
