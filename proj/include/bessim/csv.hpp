#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "bessim/timeseries.hpp"

namespace bessim {

/// Parse an ISO-8601 UTC timestamp like "2023-01-01T13:30:00Z" (the 'T'
/// may be a space, seconds and the trailing 'Z' are optional). Returns
/// Unix epoch seconds.
std::int64_t parse_iso8601_utc(const std::string& s);

/// Format epoch seconds back to "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601_utc(std::int64_t epoch_s);

/// Shortest decimal representation that round-trips the double.
std::string format_double(double v);

// Input schemas. Headers are fixed:
//   demand-long: timestamp,household_id,demand_kwh   (half-hourly)
//   wind:        timestamp,wind_speed_ms             (hourly, 10 m)
//   day-ahead:   timestamp,price_eur_per_mwh         (hourly)
// Rows may arrive unordered; duplicate timestamps are an error; absent
// timestamps inside the span become gap indices. Day-ahead prices are
// converted to EUR/kWh on load.

TimeSeries load_wind_csv(const std::filesystem::path& path);
TimeSeries load_day_ahead_csv(const std::filesystem::path& path);
HouseholdDemandSet load_demand_csv(const std::filesystem::path& path);

void write_wind_csv(const std::filesystem::path& path, const TimeSeries& ts);
void write_day_ahead_csv(const std::filesystem::path& path, const TimeSeries& ts_eur_per_mwh);
void write_demand_csv(const std::filesystem::path& path, const HouseholdDemandSet& set);

} // namespace bessim
