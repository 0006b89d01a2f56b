#pragma once

#include <cstddef>
#include <vector>

#include "ctnet/data/scaler.hpp"
#include "ctnet/data/series.hpp"
#include "ctnet/data/windows.hpp"

namespace ctnet {

/// A series after forward fill, chronological split and train-only scaling.
struct PreparedSeries {
  TimeSeries train;  // filled, bps
  TimeSeries test;
  ScalerParams scaler;
  std::vector<double> train_normalized;
  std::vector<double> test_normalized;

  /// Windows over one side only; test windows never reach into the train span.
  WindowedDataset train_windows(std::size_t window_length) const;
  WindowedDataset test_windows(std::size_t window_length) const;
};

/// Fill, split at floor(n * train_fraction) and fit the scaler on the train
/// side. Both sides must hold more than `max_window` points.
PreparedSeries prepare_series(const TimeSeries& series, double train_fraction,
                              std::size_t max_window);

/// Same, reusing a previously fitted scaler (e.g. from a checkpoint).
PreparedSeries prepare_series(const TimeSeries& series, double train_fraction,
                              std::size_t max_window, const ScalerParams& scaler);

}  // namespace ctnet
