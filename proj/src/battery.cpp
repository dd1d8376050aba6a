#include "bessim/battery.hpp"

#include "bessim/errors.hpp"

namespace bessim {

BatterySpec BatterySpec::community(double capacity_kwh) {
    BatterySpec b;
    b.soc_min = 0.0;
    b.soc_max = capacity_kwh;
    b.soc_initial = 0.0;
    b.p_max = 0.5 * capacity_kwh;
    b.validate();
    return b;
}

void BatterySpec::validate() const {
    if (!(0.0 <= soc_min && soc_min <= soc_initial && soc_initial <= soc_max))
        throw ConfigError("battery requires 0 <= soc_min <= soc_initial <= soc_max");
    if (!(eta_c > 0.0 && eta_c <= 1.0 && eta_d > 0.0 && eta_d <= 1.0 && eta_cd > 0.0 &&
          eta_cd <= 1.0))
        throw ConfigError("battery efficiencies must lie in (0, 1]");
    if (p_max < 0.0) throw ConfigError("battery p_max must be nonnegative");
    if (e_max < 0.0) throw ConfigError("battery e_max must be nonnegative");
    if (lambda_max_cycles <= 0.0) throw ConfigError("lambda_max_cycles must be positive");
    if (lambda_charging < 0.0 || lambda_capacity < 0.0)
        throw ConfigError("regularization weights must be nonnegative");
    if (soc_eod_min_frac < 0.0 || soc_eod_min_frac > 1.0)
        throw ConfigError("soc_eod_min_frac must lie in [0, 1]");
}

} // namespace bessim
