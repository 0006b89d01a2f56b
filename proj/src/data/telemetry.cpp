#include "ctnet/data/telemetry.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ctnet/numerics/errors.hpp"

namespace ctnet {

using json = nlohmann::json;

RawTelemetry parse_telemetry_json(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("telemetry: malformed JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("telemetry: expected a JSON array of records");

  RawTelemetry raw;
  std::optional<TelemetryMode> mode;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& rec = doc[i];
    const std::string where = "telemetry record " + std::to_string(i);
    if (!rec.is_object()) throw ParseError(where + ": expected an object");
    auto ts = rec.find("ts");
    if (ts == rec.end() || !ts->is_number_integer()) {
      throw ParseError(where + ": missing integer 'ts'");
    }
    const bool has_octets = rec.contains("octets");
    const bool has_bps = rec.contains("bps");
    if (has_octets == has_bps) {
      throw ParseError(where + ": unknown units, expected exactly one of 'octets' or 'bps'");
    }
    const TelemetryMode this_mode = has_octets ? TelemetryMode::counter : TelemetryMode::rate;
    if (mode && *mode != this_mode) throw ParseError(where + ": mixes counter and rate records");
    mode = this_mode;

    TelemetryRecord out;
    out.timestamp = ts->get<std::int64_t>();
    if (has_octets) {
      const json& oct = rec["octets"];
      if (!oct.is_number_unsigned() && !(oct.is_number_integer() && oct.get<std::int64_t>() >= 0)) {
        throw ParseError(where + ": 'octets' must be an unsigned integer");
      }
      out.octets = oct.get<std::uint64_t>();
    } else {
      const json& bps = rec["bps"];
      if (bps.is_null()) {
        out.bps = std::nullopt;
      } else if (bps.is_number()) {
        out.bps = bps.get<double>();
      } else {
        throw ParseError(where + ": 'bps' must be a number or null");
      }
    }
    raw.records.push_back(out);
  }
  raw.mode = mode.value_or(TelemetryMode::counter);
  std::stable_sort(raw.records.begin(), raw.records.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  for (std::size_t i = 1; i < raw.records.size(); ++i) {
    if (raw.records[i].timestamp == raw.records[i - 1].timestamp) {
      throw ParseError("telemetry: duplicate timestamp " +
                       std::to_string(raw.records[i].timestamp));
    }
  }
  return raw;
}

RawTelemetry read_telemetry_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open telemetry file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_telemetry_json(buf.str());
}

TimeSeries counters_to_bps(const RawTelemetry& raw, const CounterOptions& options) {
  if (raw.mode != TelemetryMode::counter) throw DataError("counters_to_bps: telemetry is not in counter mode");
  if (raw.records.size() < 2) throw DataError("counters_to_bps: need at least 2 records");
  if (options.interval_seconds <= 0) throw ConfigError("interval must be positive");
  if (options.counter_bits != 32 && options.counter_bits != 64) {
    throw ConfigError("counter width must be 32 or 64 bits");
  }
  TimeSeries series;
  for (std::size_t i = 1; i < raw.records.size(); ++i) {
    const auto& start = raw.records[i - 1];
    const auto& end = raw.records[i];
    series.timestamps.push_back(end.timestamp);
    if (end.timestamp - start.timestamp != options.interval_seconds) {
      series.values.emplace_back(std::nullopt);
      continue;
    }
    std::uint64_t delta = end.octets - start.octets;  // modulo 2^64
    if (options.counter_bits == 32) delta &= 0xFFFFFFFFull;
    double bits = static_cast<double>(delta) * 8.0;
    if (options.divide_by_interval) bits /= static_cast<double>(options.interval_seconds);
    series.values.emplace_back(bits);
  }
  return series;
}

TimeSeries telemetry_to_series(const RawTelemetry& raw, const CounterOptions& options) {
  if (raw.mode == TelemetryMode::counter) return counters_to_bps(raw, options);
  TimeSeries series;
  for (const auto& rec : raw.records) {
    series.timestamps.push_back(rec.timestamp);
    series.values.push_back(rec.bps);
  }
  return series;
}

}  // namespace ctnet
