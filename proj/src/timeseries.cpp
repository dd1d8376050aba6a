#include "bessim/timeseries.hpp"

#include <algorithm>
#include <cmath>

#include "bessim/errors.hpp"
#include "bessim/spline.hpp"

namespace bessim {

std::string unit_name(Unit u) {
    switch (u) {
    case Unit::Kilowatt: return "kW";
    case Unit::KilowattHour: return "kWh";
    case Unit::MetersPerSecond: return "m/s";
    case Unit::EurPerKilowattHour: return "EUR/kWh";
    case Unit::EurPerMegawattHour: return "EUR/MWh";
    }
    return "?";
}

std::int64_t TimeSeries::step_seconds() const {
    return static_cast<std::int64_t>(std::llround(step_hours * 3600.0));
}

std::int64_t TimeSeries::timestamp_at(std::size_t i) const {
    return start_epoch_s + static_cast<std::int64_t>(i) * step_seconds();
}

bool TimeSeries::aligned_with(const TimeSeries& other) const {
    return start_epoch_s == other.start_epoch_s && step_seconds() == other.step_seconds() &&
           values.size() == other.values.size();
}

bool TimeSeries::is_missing(std::size_t i) const {
    return std::binary_search(missing.begin(), missing.end(), i);
}

void HouseholdDemandSet::check_aligned() const {
    if (households.empty())
        throw AlignmentError("household demand set is empty");
    const TimeSeries& first = households.begin()->second;
    for (const auto& [id, ts] : households) {
        if (!ts.aligned_with(first))
            throw AlignmentError("household '" + id + "' is not aligned with the others");
    }
}

TimeSeries aggregate_households(const HouseholdDemandSet& set) {
    set.check_aligned();
    const TimeSeries& first = set.households.begin()->second;
    TimeSeries out;
    out.start_epoch_s = first.start_epoch_s;
    out.step_hours = first.step_hours;
    out.unit = first.unit;
    out.values.assign(first.size(), 0.0);
    for (const auto& [id, ts] : set.households) {
        if (!ts.gap_free())
            throw AlignmentError("household '" + id + "' has gaps; fill before aggregating");
        for (std::size_t i = 0; i < ts.size(); ++i)
            out.values[i] += ts.values[i];
    }
    return out;
}

namespace {

bool physical_unit(Unit u) {
    return u == Unit::MetersPerSecond || u == Unit::Kilowatt || u == Unit::KilowattHour;
}

} // namespace

TimeSeries fill_and_resample(const TimeSeries& ts) {
    constexpr double half_hour = 0.5;
    if (ts.values.empty())
        throw InterpolationError("cannot interpolate an empty series");
    if (std::abs(ts.step_hours - half_hour) < 1e-12 && ts.gap_free())
        return ts; // already on the working grid

    // Pass 1: fill gaps at the native grid.
    std::vector<double> kx, ky;
    kx.reserve(ts.size());
    ky.reserve(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!ts.is_missing(i)) {
            kx.push_back(static_cast<double>(i) * ts.step_hours);
            ky.push_back(ts.values[i]);
        }
    }
    if (kx.size() < 4)
        throw InterpolationError("gap fill needs at least 4 known points, got " +
                                 std::to_string(kx.size()));

    TimeSeries filled = ts;
    filled.missing.clear();
    if (kx.size() < ts.size()) {
        CubicSpline pass1(kx, ky);
        for (std::size_t i : ts.missing)
            filled.values[i] = pass1(static_cast<double>(i) * ts.step_hours);
    }

    // Pass 2: resample the complete series onto the 0.5 h grid.
    TimeSeries out;
    out.start_epoch_s = ts.start_epoch_s;
    out.step_hours = half_hour;
    out.unit = ts.unit;
    if (std::abs(ts.step_hours - half_hour) < 1e-12) {
        out.values = std::move(filled.values);
    } else {
        std::vector<double> fx(filled.size());
        for (std::size_t i = 0; i < filled.size(); ++i)
            fx[i] = static_cast<double>(i) * ts.step_hours;
        CubicSpline pass2(fx, filled.values);
        const double span_h = fx.back();
        const std::size_t n_out = static_cast<std::size_t>(std::llround(span_h / half_hour)) + 1;
        out.values.resize(n_out);
        for (std::size_t i = 0; i < n_out; ++i)
            out.values[i] = pass2(static_cast<double>(i) * half_hour);
    }
    if (physical_unit(out.unit))
        for (double& v : out.values)
            v = std::max(v, 0.0); // splines can undershoot below the physical floor
    return out;
}

TimeSeries replicate_to_halfhour(const TimeSeries& ts) {
    if (!ts.gap_free())
        throw InterpolationError("cannot replicate a series with gaps to half-hour steps");
    if (std::abs(ts.step_hours - 1.0) > 1e-12)
        throw InterpolationError("replicate_to_halfhour expects an hourly series");
    TimeSeries out;
    out.start_epoch_s = ts.start_epoch_s;
    out.step_hours = 0.5;
    out.unit = ts.unit;
    out.values.reserve(ts.size() * 2);
    for (double v : ts.values) {
        out.values.push_back(v);
        out.values.push_back(v);
    }
    return out;
}

TimeSeries energy_to_power(const TimeSeries& ts) {
    if (ts.unit != Unit::KilowattHour)
        throw AlignmentError("energy_to_power expects a kWh series");
    TimeSeries out = ts;
    out.unit = Unit::Kilowatt;
    for (double& v : out.values)
        v /= ts.step_hours;
    return out;
}

TimeSeries scaled(const TimeSeries& ts, double factor) {
    TimeSeries out = ts;
    for (double& v : out.values)
        v *= factor;
    return out;
}

TimeSeries conform_length(const TimeSeries& ts, std::size_t n, std::size_t max_extend) {
    if (ts.values.empty())
        throw AlignmentError("cannot conform an empty series");
    TimeSeries out = ts;
    if (ts.size() >= n) {
        out.values.resize(n);
    } else if (ts.size() + max_extend >= n) {
        out.values.resize(n, ts.values.back());
    } else {
        throw AlignmentError("series of length " + std::to_string(ts.size()) +
                             " is too short for target length " + std::to_string(n));
    }
    return out;
}

TimeSeries slice(const TimeSeries& ts, std::size_t first, std::size_t count) {
    if (!ts.gap_free())
        throw AlignmentError("cannot slice a series with gaps; fill first");
    if (first + count > ts.size())
        throw AlignmentError("slice [" + std::to_string(first) + ", " +
                             std::to_string(first + count) + ") exceeds series length " +
                             std::to_string(ts.size()));
    TimeSeries out;
    out.start_epoch_s = ts.timestamp_at(first);
    out.step_hours = ts.step_hours;
    out.unit = ts.unit;
    out.values.assign(ts.values.begin() + static_cast<std::ptrdiff_t>(first),
                      ts.values.begin() + static_cast<std::ptrdiff_t>(first + count));
    return out;
}

} // namespace bessim
