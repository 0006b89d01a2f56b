#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctnet/data/series.hpp"

namespace ctnet {

enum class TelemetryMode { counter, rate };

struct TelemetryRecord {
  std::int64_t timestamp = 0;
  std::uint64_t octets = 0;       // counter mode
  std::optional<double> bps;      // rate mode; nullopt = missing sample
};

/// Raw interface samples as polled from an SNMP octet counter (or already
/// converted rates). Records are sorted with strictly increasing timestamps.
struct RawTelemetry {
  TelemetryMode mode = TelemetryMode::counter;
  std::vector<TelemetryRecord> records;
  double capacity_bps = 40e9;
};

/// Parses a JSON array of {"ts": int, "octets": uint64} (counter mode) or
/// {"ts": int, "bps": real|null} (rate mode) objects. Other keys are
/// ignored. Throws ParseError for malformed documents, duplicate
/// timestamps, mixed modes or records carrying neither traffic field.
RawTelemetry parse_telemetry_json(const std::string& document);
RawTelemetry read_telemetry_file(const std::string& path);

struct CounterOptions {
  std::int64_t interval_seconds = 300;
  /// When false, reports bits per interval (octet delta times 8) as-is.
  bool divide_by_interval = true;
  /// Counter width for wrap-around: 64 (ifHCInOctets) or 32 (ifInOctets).
  unsigned counter_bits = 64;
};

/// One value per consecutive record pair, stamped at the interval's end:
/// ((end - start) mod 2^bits) * 8 / interval. Intervals whose spacing
/// differs from the nominal interval become missing values.
TimeSeries counters_to_bps(const RawTelemetry& raw, const CounterOptions& options = {});

/// Series for either mode: rates are copied, counters converted.
TimeSeries telemetry_to_series(const RawTelemetry& raw, const CounterOptions& options = {});

}  // namespace ctnet
