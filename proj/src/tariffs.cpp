#include "bessim/tariffs.hpp"

#include <algorithm>
#include <iostream>

#include "bessim/errors.hpp"

namespace bessim {

TariffSchedule flat_tariff(double buy_eur_kwh, double sell_eur_kwh, std::size_t length,
                           std::int64_t start_epoch_s) {
    if (sell_eur_kwh < 0.0 || buy_eur_kwh < 0.0)
        throw ConfigError("tariff prices must be nonnegative");
    if (sell_eur_kwh > buy_eur_kwh)
        throw ConfigError("flat tariff requires sell <= buy (got sell " +
                          std::to_string(sell_eur_kwh) + " > buy " + std::to_string(buy_eur_kwh) +
                          ")");
    if (sell_eur_kwh == buy_eur_kwh && buy_eur_kwh > 0.0)
        std::cerr << "warning: flat tariff with buy == sell (" << buy_eur_kwh
                  << " EUR/kWh); storage decisions become price-indifferent\n";
    TariffSchedule t;
    t.kind = TariffKind::Flat;
    t.buy.start_epoch_s = start_epoch_s;
    t.buy.step_hours = 0.5;
    t.buy.unit = Unit::EurPerKilowattHour;
    t.buy.values.assign(length, buy_eur_kwh);
    t.sell = t.buy;
    t.sell.values.assign(length, sell_eur_kwh);
    return t;
}

TariffSchedule dynamic_tariff(const TimeSeries& day_ahead_halfhourly, bool export_paid,
                              double adder_eur_kwh, double sell_frac, double sell_cap_eur_kwh) {
    if (!day_ahead_halfhourly.gap_free())
        throw ConfigError("day-ahead series has gaps; dynamic tariff needs a complete curve");
    if (day_ahead_halfhourly.step_hours != 0.5)
        throw ConfigError("dynamic tariff needs a half-hourly day-ahead series");
    TariffSchedule t;
    t.kind = TariffKind::Dynamic;
    t.day_ahead = day_ahead_halfhourly;
    t.buy = day_ahead_halfhourly;
    t.buy.unit = Unit::EurPerKilowattHour;
    t.sell = t.buy;
    for (std::size_t i = 0; i < day_ahead_halfhourly.size(); ++i) {
        const double b = std::max(0.0, day_ahead_halfhourly.values[i] + adder_eur_kwh);
        t.buy.values[i] = b;
        t.sell.values[i] = export_paid ? std::min(sell_frac * b, sell_cap_eur_kwh) : 0.0;
    }
    return t;
}

} // namespace bessim
