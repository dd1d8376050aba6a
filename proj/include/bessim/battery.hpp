#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace bessim {

/// Battery parameters. Efficiency/penalty defaults follow the reference
/// configuration: eta_c 0.90, eta_d 0.97, round-trip 0.87 for the market
/// model, lambda_charging 1e-7 EUR/kW, lambda_capacity 0.12 EUR/kWh,
/// 1.3 equivalent cycles per day, p_max = 0.5 * soc_max, e_max unbounded.
struct BatterySpec {
    double soc_min = 0.0;     // kWh
    double soc_max = 0.0;     // kWh
    double soc_initial = 0.0; // kWh
    double p_max = 0.0;       // kW
    double e_max = std::numeric_limits<double>::infinity(); // kWh per step
    double eta_c = 0.90;
    double eta_d = 0.97;
    double eta_cd = 0.87;
    double lambda_charging = 1e-7;  // EUR per kW of (dis)charge
    double lambda_capacity = 0.12;  // EUR per kWh of end-of-day emptiness
    double lambda_max_cycles = 1.3; // cycles per day
    double soc_eod_min_frac = 0.0;  // fraction of soc_max required at EoD

    /// Community battery of the given capacity with the standard
    /// proportional power rating (p_max = capacity / 2).
    static BatterySpec community(double capacity_kwh);

    void validate() const; // throws ConfigError on violated invariants

    double cycle_budget_kwh() const { return lambda_max_cycles * 2.0 * (soc_max - soc_min); }
};

/// Dispatch plan over T steps. soc has T+1 entries (step boundaries);
/// power and energy vectors have T entries. objective_value is the raw
/// bill/profit term, excluding any regularization.
struct Schedule {
    std::int64_t start_epoch_s = 0;
    double step_hours = 0.5;
    std::vector<double> soc;         // kWh, length T+1
    std::vector<double> p_charge;    // kW
    std::vector<double> p_discharge; // kW
    std::vector<double> e_buy;       // kWh
    std::vector<double> e_sell;      // kWh
    double objective_value = 0.0;    // EUR

    std::size_t size() const { return p_charge.size(); }
};

enum class ControllerMode { Greedy, Lp, Milp, Rolling };

struct SolveOptions {
    bool use_l1 = false;
    bool use_l2 = false;
    double eod_min_frac = 0.0; // 0, 0.5, or 1.0 typical
    ControllerMode mode = ControllerMode::Lp;
    int rolling_period_steps = 2; // re-optimize hourly
    int horizon_steps = 48;       // one-day lookahead
};

} // namespace bessim
