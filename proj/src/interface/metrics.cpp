#include "ctnet/interface/metrics.hpp"

#include <cmath>
#include <string>

#include "ctnet/numerics/errors.hpp"

namespace ctnet {

MetricsReport compute_metrics(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) {
    throw DataError("metrics: " + std::to_string(predicted.size()) + " predictions vs " +
                    std::to_string(actual.size()) + " actuals");
  }
  if (predicted.empty()) throw DataError("metrics: no test instances");
  double abs_sum = 0.0, sq_sum = 0.0, actual_sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double diff = predicted[i] - actual[i];
    abs_sum += std::abs(diff);
    sq_sum += diff * diff;
    actual_sum += std::abs(actual[i]);
  }
  if (!(actual_sum > 0.0)) throw DataError("metrics: WAPE undefined when all actuals are zero");
  const auto n = static_cast<double>(predicted.size());
  MetricsReport report;
  report.n = predicted.size();
  report.mae = abs_sum / n;
  report.rmse = std::sqrt(sq_sum / n);
  report.wape = abs_sum / actual_sum * 100.0;
  if (!std::isfinite(report.mae) || !std::isfinite(report.rmse) || !std::isfinite(report.wape)) {
    throw NumericError("metrics: non-finite result");
  }
  return report;
}

}  // namespace ctnet
