#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bessim {

enum class Unit {
    Kilowatt,
    KilowattHour,
    MetersPerSecond,
    EurPerKilowattHour,
    EurPerMegawattHour,
};

std::string unit_name(Unit u);

/// Uniformly sampled series. `missing` lists indices that are gaps (raw
/// inputs only); values at those indices are unspecified.
struct TimeSeries {
    std::int64_t start_epoch_s = 0;
    double step_hours = 0.5;
    Unit unit = Unit::Kilowatt;
    std::vector<double> values;
    std::vector<std::size_t> missing; // sorted, unique

    std::size_t size() const { return values.size(); }
    bool gap_free() const { return missing.empty(); }
    std::int64_t step_seconds() const;
    std::int64_t timestamp_at(std::size_t i) const;
    bool aligned_with(const TimeSeries& other) const;
    bool is_missing(std::size_t i) const;
};

/// Per-household demand series, all aligned (same start, step, length).
struct HouseholdDemandSet {
    std::map<std::string, TimeSeries> households;
    std::size_t count() const { return households.size(); }
    void check_aligned() const; // throws AlignmentError
};

/// Element-wise sum of all member series. Members must be aligned and
/// gap-free.
TimeSeries aggregate_households(const HouseholdDemandSet& set);

/// Two-pass natural cubic spline gap fill and resample:
/// pass 1 fills gaps on the native grid, pass 2 maps the complete series
/// onto the 0.5 h grid covering the same span (2N-1 points for N hourly
/// inputs). Half-hourly gap-free input is returned unchanged. Negative
/// interpolated values are clamped to zero for physical units (m/s, kW,
/// kWh). Needs at least 4 known points.
TimeSeries fill_and_resample(const TimeSeries& ts);

/// Replicate each hourly value onto both half-hour steps (used for
/// day-ahead prices). Input must be gap-free and hourly.
TimeSeries replicate_to_halfhour(const TimeSeries& ts);

/// Convert a kWh-per-step series to average power in kW (divide by step).
TimeSeries energy_to_power(const TimeSeries& ts);

/// Multiply every value by `factor` (unit preserved).
TimeSeries scaled(const TimeSeries& ts, double factor);

/// Truncate to `n` values, or extend by repeating the last value for at
/// most `max_extend` steps. Anything else is an alignment error.
TimeSeries conform_length(const TimeSeries& ts, std::size_t n, std::size_t max_extend = 2);

/// Copy `count` values starting at index `first`. The result's start time
/// is shifted accordingly. Input must be gap-free and the window in range.
TimeSeries slice(const TimeSeries& ts, std::size_t first, std::size_t count);

} // namespace bessim
