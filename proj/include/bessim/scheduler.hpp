#pragma once

#include <filesystem>

#include "bessim/battery.hpp"
#include "bessim/tariffs.hpp"
#include "bessim/timeseries.hpp"

namespace bessim {

/// Rule-based controller: surplus charges the battery first (capped by
/// p_max and headroom) and the remainder is exported; deficit discharges
/// first and the remainder is imported. The daily cycle budget is spent
/// greedily and resets every 48 steps.
Schedule greedy_schedule(const TimeSeries& gen_kw, const TimeSeries& demand_kw,
                         const BatterySpec& battery);

/// One-day linear program (any horizon up to 48 steps): minimize the bill
/// plus optional L1 power and L2 end-of-horizon emptiness penalties,
/// subject to SoC recursion, power balance, the daily cycle cap, and an
/// optional minimum end-of-day SoC. Optimality is certified to a relative
/// primal-dual gap of 1e-7.
Schedule lp_day_schedule(const TimeSeries& gen_kw, const TimeSeries& demand_kw,
                         const TariffSchedule& tariff, const BatterySpec& battery,
                         const SolveOptions& opts);

/// LP plus per-step binaries enforcing charge/discharge and import/export
/// exclusivity (big-M when e_max is unbounded).
Schedule milp_day_schedule(const TimeSeries& gen_kw, const TimeSeries& demand_kw,
                           const TariffSchedule& tariff, const BatterySpec& battery,
                           const SolveOptions& opts);

/// Re-optimize every opts.rolling_period_steps steps over a lookahead of
/// opts.horizon_steps, committing only the first period of each window.
/// The cycle cap applies per optimization window.
Schedule rolling_horizon_schedule(const TimeSeries& gen_kw, const TimeSeries& demand_kw,
                                  const TariffSchedule& tariff, const BatterySpec& battery,
                                  const SolveOptions& opts);

/// Run the configured controller over a whole series, chaining daily
/// solves by carrying each day's final SoC into the next day. A trailing
/// partial day is truncated with a warning.
Schedule chain_year(const TimeSeries& gen_kw, const TimeSeries& demand_kw,
                    const TariffSchedule& tariff, const BatterySpec& battery,
                    const SolveOptions& opts);

/// Raw energy bill: sum of buy costs minus sell revenue. Excludes
/// regularization, turbine amortization, and rental fees.
double bill(const Schedule& schedule, const TariffSchedule& tariff);

/// Full solver objective reconstructed from a schedule: bill plus the
/// regularization terms enabled in `opts`. Lets two solvers be compared
/// on the quantity they actually minimize even when optima are tied.
double day_objective(const Schedule& schedule, const TariffSchedule& tariff,
                     const BatterySpec& battery, const SolveOptions& opts);

/// Exhaustive dynamic-programming reference: exact optimum over SoC
/// trajectories restricted to a uniform grid. Intended for toy instances
/// (T <= 12, grid <= 201). The cycle cap is ignored unless
/// enforce_cycle_cap is set (budget then discretized in grid units).
double dp_oracle(const TimeSeries& gen_kw, const TimeSeries& demand_kw,
                 const TariffSchedule& tariff, const BatterySpec& battery,
                 std::size_t soc_grid_points, bool enforce_cycle_cap = false);

/// Invariant checks for community schedules: bounds, SoC recursion, power
/// balance, exclusivity-free energy accounting, and (optionally) the
/// per-day cycle cap. Throws ValidationError.
void validate_community_schedule(const Schedule& s, const TimeSeries& gen_kw,
                                 const TimeSeries& demand_kw, const BatterySpec& battery,
                                 bool check_daily_cycle_cap);

/// CSV dump: step,timestamp,soc_kwh,p_charge_kw,p_discharge_kw,e_buy_kwh,e_sell_kwh
/// with soc_kwh the state at the end of each step.
void write_schedule_csv(const std::filesystem::path& path, const Schedule& s);

} // namespace bessim
