#include "ctnet/data/series.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "ctnet/numerics/errors.hpp"

namespace ctnet {

bool TimeSeries::has_missing() const {
  for (const auto& v : values)
    if (!v) return true;
  return false;
}

std::vector<double> TimeSeries::dense_values() const {
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) throw DataError("series has a missing value at index " + std::to_string(i));
    out.push_back(*values[i]);
  }
  return out;
}

void TimeSeries::validate() const {
  if (timestamps.size() != values.size()) {
    throw DataError("series has " + std::to_string(timestamps.size()) + " timestamps but " +
                    std::to_string(values.size()) + " values");
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (timestamps[i] <= timestamps[i - 1]) {
      throw DataError("timestamps not strictly increasing at index " + std::to_string(i));
    }
  }
}

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

template <typename T>
T parse_number(const std::string& field, std::size_t line) {
  T value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ParseError("series csv line " + std::to_string(line) + ": cannot parse '" + field +
                     "'");
  }
  return value;
}

}  // namespace

TimeSeries read_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("series csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "timestamp,bps") {
    throw ParseError("series csv: expected header 'timestamp,bps', got '" + line + "'");
  }
  TimeSeries series;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError("series csv line " + std::to_string(line_no) + ": expected 2 fields");
    }
    series.timestamps.push_back(parse_number<std::int64_t>(line.substr(0, comma), line_no));
    const std::string field = line.substr(comma + 1);
    if (field.empty()) {
      series.values.emplace_back(std::nullopt);
    } else {
      const double v = parse_number<double>(field, line_no);
      if (!std::isfinite(v)) {
        throw ParseError("series csv line " + std::to_string(line_no) + ": non-finite value");
      }
      series.values.emplace_back(v);
    }
  }
  series.validate();
  return series;
}

TimeSeries read_series_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open series file '" + path + "'");
  return read_series_csv(in);
}

void write_series_csv(std::ostream& out, const TimeSeries& series) {
  series.validate();
  out << "timestamp,bps\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.timestamps[i] << ',';
    if (series.values[i]) out << format_real(*series.values[i]);
    out << '\n';
  }
}

void write_series_csv_file(const std::string& path, const TimeSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write series file '" + path + "'");
  write_series_csv(out, series);
  if (!out) throw DataError("write failed for '" + path + "'");
}

TimeSeries forward_fill(const TimeSeries& series) {
  std::optional<double> first;
  for (const auto& v : series.values) {
    if (v) {
      first = v;
      break;
    }
  }
  if (!first) throw DataError("forward_fill: series has no observed values");
  TimeSeries out = series;
  double last = *first;
  for (auto& v : out.values) {
    if (v) {
      last = *v;
    } else {
      v = last;
    }
  }
  return out;
}

std::pair<TimeSeries, TimeSeries> chrono_split(const TimeSeries& series, double train_fraction,
                                               std::size_t min_side) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train fraction must lie in (0, 1), got " + std::to_string(train_fraction));
  }
  const std::size_t n = series.size();
  const auto cut = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));
  if (cut <= min_side || n - cut <= min_side) {
    throw DataError("split of " + std::to_string(n) + " points at " + std::to_string(cut) +
                    " leaves a side with <= " + std::to_string(min_side) + " points");
  }
  auto slice = [&](std::size_t from, std::size_t to) {
    TimeSeries part;
    part.timestamps.assign(series.timestamps.begin() + static_cast<std::ptrdiff_t>(from),
                           series.timestamps.begin() + static_cast<std::ptrdiff_t>(to));
    part.values.assign(series.values.begin() + static_cast<std::ptrdiff_t>(from),
                       series.values.begin() + static_cast<std::ptrdiff_t>(to));
    return part;
  };
  return {slice(0, cut), slice(cut, n)};
}

}  // namespace ctnet
