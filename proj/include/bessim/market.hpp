#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "bessim/battery.hpp"
#include "bessim/timeseries.hpp"

namespace bessim {

/// Capacity -> EUR/year mapping (rental price bounds, savings, costs).
struct PriceCurve {
    std::vector<std::pair<double, double>> points; // (capacity_kwh, eur_per_year)
    void validate() const; // strictly increasing capacities, finite values
};

struct MarketResult {
    Schedule schedule;
    double profit_eur = 0.0;
    double capacity_kwh = 0.0;
};

/// One-day arbitrage plan against day-ahead prices: all charging is
/// imported and all discharging exported at the same spot price, with the
/// round-trip efficiency applied on the charge side of the SoC recursion.
/// Schedule.objective_value is the day's profit (positive = earning).
Schedule market_day_schedule(const TimeSeries& day_ahead_eur_kwh, const BatterySpec& battery);

/// Chain daily arbitrage solves over a whole price series with SoC
/// carryover. The battery is sized by the proportional rule
/// (p_max = capacity / 2); a trailing partial day is truncated with a
/// warning. An optional end-of-day SoC floor models operator practice.
MarketResult market_year_profit(const TimeSeries& day_ahead_eur_kwh, double capacity_kwh,
                                double soc_eod_min_frac = 0.0);

/// Lost market revenue when renting out capacity C of a battery of
/// full_capacity: min_price(C) = profit(full) - profit(full - C). The
/// residual battery keeps the proportional power rating.
PriceCurve opportunity_cost_curve(const TimeSeries& day_ahead_eur_kwh, double full_capacity_kwh,
                                  const std::vector<double>& rented_capacities,
                                  double soc_eod_min_frac = 0.0);

/// Invariant checks for market schedules: bounds, the market SoC
/// recursion, import/export identities, and (optionally) the per-day
/// cycle cap. Throws ValidationError.
void validate_market_schedule(const Schedule& s, const BatterySpec& battery,
                              bool check_daily_cycle_cap);

/// CSV dump: capacity_kwh,eur_per_year
void write_price_curve_csv(const std::filesystem::path& path, const PriceCurve& curve);

} // namespace bessim
