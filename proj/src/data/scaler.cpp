#include "ctnet/data/scaler.hpp"

#include <algorithm>
#include <cmath>

#include "ctnet/numerics/errors.hpp"

namespace ctnet {

double ScalerParams::transform(double v) const {
  const double span = max - min;
  return span > 0.0 ? (v - min) / span : 0.0;
}

double ScalerParams::inverse(double v) const {
  const double span = max - min;
  return span > 0.0 ? v * span + min : min;
}

ScalerParams fit_scaler(std::span<const double> values) {
  if (values.empty()) throw DataError("fit_scaler: no values to fit");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!std::isfinite(*lo) || !std::isfinite(*hi)) throw NumericError("fit_scaler: non-finite value");
  return ScalerParams{*lo, *hi};
}

std::vector<double> transform(std::span<const double> values, const ScalerParams& scaler) {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [&](double v) { return scaler.transform(v); });
  return out;
}

std::vector<double> inverse(std::span<const double> normalized, const ScalerParams& scaler) {
  std::vector<double> out(normalized.size());
  std::transform(normalized.begin(), normalized.end(), out.begin(),
                 [&](double v) { return scaler.inverse(v); });
  return out;
}

}  // namespace ctnet
