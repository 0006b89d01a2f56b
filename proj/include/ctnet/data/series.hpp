#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ctnet {

/// Timestamped bps samples; std::nullopt marks a missing value.
struct TimeSeries {
  std::vector<std::int64_t> timestamps;  // UTC epoch seconds, strictly increasing
  std::vector<std::optional<double>> values;

  std::size_t size() const { return values.size(); }
  bool has_missing() const;
  /// Values as plain doubles; throws DataError if any point is missing.
  std::vector<double> dense_values() const;
  /// Throws DataError on length mismatch or non-increasing timestamps.
  void validate() const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;
};

/// Series CSV: header `timestamp,bps`, LF line endings, empty field = missing.
TimeSeries read_series_csv(std::istream& in);
TimeSeries read_series_csv_file(const std::string& path);
void write_series_csv(std::ostream& out, const TimeSeries& series);
void write_series_csv_file(const std::string& path, const TimeSeries& series);

/// Replaces each missing value with the last observed one. Missing values
/// before the first observation take the first observed value.
TimeSeries forward_fill(const TimeSeries& series);

/// Prefix/suffix split at floor(n * train_fraction). Throws ConfigError for
/// a fraction outside (0,1) and DataError if either side has <= min_side
/// points (pass the window length so both sides can be windowed).
std::pair<TimeSeries, TimeSeries> chrono_split(const TimeSeries& series,
                                               double train_fraction = 0.8,
                                               std::size_t min_side = 0);

/// Formats a real with 17 significant digits.
std::string format_real(double value);

}  // namespace ctnet
