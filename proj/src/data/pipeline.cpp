#include "ctnet/data/pipeline.hpp"

namespace ctnet {

namespace {

PreparedSeries split_filled(const TimeSeries& series, double train_fraction,
                            std::size_t max_window) {
  auto [train, test] = chrono_split(forward_fill(series), train_fraction, max_window);
  PreparedSeries out;
  out.train = std::move(train);
  out.test = std::move(test);
  return out;
}

void apply_scaler(PreparedSeries& p) {
  p.train_normalized = transform(p.train.dense_values(), p.scaler);
  p.test_normalized = transform(p.test.dense_values(), p.scaler);
}

}  // namespace

WindowedDataset PreparedSeries::train_windows(std::size_t window_length) const {
  return make_windows(train_normalized, window_length, train.timestamps);
}

WindowedDataset PreparedSeries::test_windows(std::size_t window_length) const {
  return make_windows(test_normalized, window_length, test.timestamps);
}

PreparedSeries prepare_series(const TimeSeries& series, double train_fraction,
                              std::size_t max_window) {
  PreparedSeries p = split_filled(series, train_fraction, max_window);
  p.scaler = fit_scaler(p.train.dense_values());
  apply_scaler(p);
  return p;
}

PreparedSeries prepare_series(const TimeSeries& series, double train_fraction,
                              std::size_t max_window, const ScalerParams& scaler) {
  PreparedSeries p = split_filled(series, train_fraction, max_window);
  p.scaler = scaler;
  apply_scaler(p);
  return p;
}

}  // namespace ctnet
