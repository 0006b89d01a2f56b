#pragma once

#include <span>
#include <vector>

namespace ctnet {

/// Min-max scaling bounds in bps. A degenerate range (max == min) maps
/// every value to 0 and inverts back to the constant.
struct ScalerParams {
  double min = 0.0;
  double max = 1.0;

  double transform(double v) const;
  double inverse(double v) const;
  double range() const { return max - min; }

  friend bool operator==(const ScalerParams&, const ScalerParams&) = default;
};

/// Fits on the given (training) values. Throws DataError when empty.
ScalerParams fit_scaler(std::span<const double> values);
std::vector<double> transform(std::span<const double> values, const ScalerParams& scaler);
std::vector<double> inverse(std::span<const double> normalized, const ScalerParams& scaler);

}  // namespace ctnet
