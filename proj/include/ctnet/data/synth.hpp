#pragma once

#include <cstddef>
#include <cstdint>

#include "ctnet/data/series.hpp"

namespace ctnet {

struct SynthOptions {
  std::size_t days = 29;
  std::size_t samples_per_day = 288;
  std::uint64_t seed = 0;
  double capacity_bps = 40e9;
  std::int64_t start_timestamp = 1'693'526'400;  // 2023-09-01T00:00:00Z
};

/// Synthetic edge-router traffic: base load, a diurnal sinusoid with
/// period `samples_per_day`, a weekly modulation, Gaussian noise and
/// occasional decaying bursts, clipped to [0, capacity]. Deterministic per
/// seed. Samples are spaced 86400 / samples_per_day seconds apart.
TimeSeries synth_generate(const SynthOptions& options);

}  // namespace ctnet
