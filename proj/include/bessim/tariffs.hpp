#pragma once

#include <optional>

#include "bessim/timeseries.hpp"

namespace bessim {

enum class TariffKind { Flat, Dynamic };

/// Per-step buy/sell price schedule in €/kWh. Dynamic schedules also
/// carry the raw day-ahead curve for the market simulation.
struct TariffSchedule {
    TimeSeries buy;
    TimeSeries sell;
    std::optional<TimeSeries> day_ahead;
    TariffKind kind = TariffKind::Flat;
};

/// Constant buy/sell prices over `length` half-hour steps. Requires
/// buy >= sell >= 0; buy == sell is accepted with a warning on stderr
/// (the greedy optimality argument needs the strict inequality).
TariffSchedule flat_tariff(double buy_eur_kwh, double sell_eur_kwh, std::size_t length,
                           std::int64_t start_epoch_s = 0);

/// Retail prices derived from a gap-free half-hourly day-ahead series:
///   buy_i  = max(0, da_i + adder)
///   sell_i = export_paid ? min(sell_frac * buy_i, sell_cap) : 0
/// Defaults: €0.155/kWh adder, 90% of buy capped at €0.10/kWh.
TariffSchedule dynamic_tariff(const TimeSeries& day_ahead_halfhourly, bool export_paid,
                              double adder_eur_kwh = 0.155, double sell_frac = 0.9,
                              double sell_cap_eur_kwh = 0.10);

} // namespace bessim
