#include "ctnet/data/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ctnet/numerics/errors.hpp"
#include "ctnet/numerics/rng.hpp"

namespace ctnet {

namespace {

// Shape of the load curve, as fractions of capacity.
constexpr double kBaseLoad = 0.35;
constexpr double kDiurnalAmplitude = 0.15;
constexpr double kWeeklyAmplitude = 0.08;
constexpr double kNoiseStd = 0.015;
constexpr double kBurstProbability = 0.004;
constexpr double kBurstPeak = 0.12;
constexpr double kBurstDecay = 0.7;

}  // namespace

TimeSeries synth_generate(const SynthOptions& options) {
  if (options.days == 0) throw ConfigError("synth: days must be positive");
  if (options.samples_per_day == 0) throw ConfigError("synth: samples_per_day must be positive");
  if (!(options.capacity_bps > 0.0)) throw ConfigError("synth: capacity must be positive");

  const std::size_t n = options.days * options.samples_per_day;
  const auto spd = static_cast<double>(options.samples_per_day);
  const std::int64_t step = 86400 / static_cast<std::int64_t>(options.samples_per_day);
  const double two_pi = 2.0 * std::numbers::pi;

  Rng rng(options.seed);
  TimeSeries series;
  series.timestamps.reserve(n);
  series.values.reserve(n);
  double burst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = static_cast<double>(i);
    // Trough in the early morning, peak in the evening.
    const double diurnal = -std::cos(two_pi * (t / spd - 0.125));
    const double weekly = 1.0 - kWeeklyAmplitude * (0.5 + 0.5 * std::cos(two_pi * t / (7.0 * spd)));
    burst *= kBurstDecay;
    if (rng.uniform() < kBurstProbability) burst += kBurstPeak * (0.5 + rng.uniform());
    const double load =
        (kBaseLoad + kDiurnalAmplitude * diurnal) * weekly + burst + kNoiseStd * rng.normal();
    const double bps = std::clamp(load * options.capacity_bps, 0.0, options.capacity_bps);
    series.timestamps.push_back(options.start_timestamp + static_cast<std::int64_t>(i) * step);
    series.values.emplace_back(bps);
  }
  return series;
}

}  // namespace ctnet
