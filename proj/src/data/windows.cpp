#include "ctnet/data/windows.hpp"

#include <algorithm>

#include "ctnet/numerics/errors.hpp"

namespace ctnet {

WindowedDataset make_windows(std::span<const double> values, std::size_t window_length,
                             std::span<const std::int64_t> timestamps) {
  if (window_length == 0) throw DataError("make_windows: window length must be positive");
  if (values.size() <= window_length) {
    throw DataError("make_windows: series of " + std::to_string(values.size()) +
                    " points is too short for window " + std::to_string(window_length));
  }
  if (!timestamps.empty() && timestamps.size() != values.size()) {
    throw DataError("make_windows: timestamps and values differ in length");
  }
  const std::size_t n = values.size() - window_length;
  WindowedDataset ds;
  ds.window_length = window_length;
  ds.inputs = Tensor({n, window_length, 1});
  ds.targets = Tensor({n, 1});
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(i), window_length,
                ds.inputs.raw() + i * window_length);
    ds.targets[i] = values[i + window_length];
    if (!timestamps.empty()) ds.target_timestamps.push_back(timestamps[i + window_length]);
  }
  return ds;
}

WindowedDataset WindowedDataset::slice(std::size_t first, std::size_t count) const {
  if (count == 0 || first + count > size()) throw DataError("dataset slice out of range");
  std::vector<std::size_t> rows(count);
  for (std::size_t i = 0; i < count; ++i) rows[i] = first + i;
  return gather(rows);
}

WindowedDataset WindowedDataset::gather(std::span<const std::size_t> rows) const {
  if (rows.empty()) throw DataError("dataset gather: no rows");
  const std::size_t l = window_length;
  WindowedDataset out;
  out.window_length = l;
  out.inputs = Tensor({rows.size(), l, 1});
  out.targets = Tensor({rows.size(), 1});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows[i];
    if (r >= size()) throw DataError("dataset gather: row out of range");
    std::copy_n(inputs.raw() + r * l, l, out.inputs.raw() + i * l);
    out.targets[i] = targets[r];
    if (!target_timestamps.empty()) out.target_timestamps.push_back(target_timestamps[r]);
  }
  return out;
}

}  // namespace ctnet
