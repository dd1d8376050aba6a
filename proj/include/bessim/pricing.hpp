#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "bessim/market.hpp"
#include "bessim/scheduler.hpp"
#include "bessim/tariffs.hpp"
#include "bessim/timeseries.hpp"
#include "bessim/wind.hpp"

namespace bessim {

/// Everything a pricing sweep needs: the community's series and tariff,
/// the operator's market prices and fleet size, and fixed yearly costs.
struct PricingInputs {
    TimeSeries gen_kw;
    TimeSeries demand_kw;
    TariffSchedule tariff;
    std::string tariff_label;
    TimeSeries day_ahead_eur_kwh;          // operator's trading prices
    double full_market_capacity_kwh = 0.0; // fleet backing the rental
    double turbine_cost_eur_per_year = 0.0;
    double market_eod_min_frac = 0.0;
    // Community dispatch: regularized LP by default (greedy is equivalent
    // under flat tariffs and may be selected instead).
    SolveOptions controller{.use_l1 = true, .use_l2 = true};
};

struct ScenarioResult {
    double annual_cost_eur = 0.0;    // bill + turbine amortization + rental
    double annual_savings_eur = 0.0; // against the no-battery baseline
    double optimal_capacity_kwh = 0.0;
    std::string tariff_label;
    double r_gen = 0.0;
};

struct SizingRow {
    double capacity_kwh = 0.0;
    double total_cost_eur = 0.0; // bill + turbine + rental at min price
    double savings_eur = 0.0;    // total_cost(0) - total_cost(C)
};

struct FeasiblePoint {
    double capacity_kwh = 0.0;
    double price_low_eur = 0.0;  // operator's minimum (opportunity cost)
    double price_high_eur = 0.0; // community's maximum willingness to pay
};

/// Community bill for a rented capacity C under the configured controller
/// (proportionally rated battery, whole series chained by day).
double community_year_bill(const PricingInputs& in, double capacity_kwh);

/// Maximum rental price the community would pay: the yearly-cost saving
/// (bill + turbine amortization) of capacity C over no battery at all.
/// `capacities` must include 0 and is swept in ascending order.
PriceCurve max_price_curve(const PricingInputs& in, const std::vector<double>& capacities);

/// Operator's minimum rental price for the same grid: day-ahead
/// opportunity cost of parting with capacity C of the fleet.
PriceCurve min_price_curve(const PricingInputs& in, const std::vector<double>& capacities);

/// Capacities where the community's maximum exceeds the operator's
/// minimum. Curves must share the capacity grid exactly.
std::vector<FeasiblePoint> feasible_region(const PriceCurve& max_curve,
                                           const PriceCurve& min_curve);

/// Total community cost per capacity with rental charged at the minimum
/// price, plus the savings column against C = 0.
std::vector<SizingRow> sizing_table(const PricingInputs& in,
                                    const std::vector<double>& capacities,
                                    const PriceCurve& min_curve);

/// Cheapest row of the sizing table; ties break toward the smaller
/// capacity.
ScenarioResult optimal_capacity(const PricingInputs& in, const std::vector<double>& capacities);
ScenarioResult optimal_capacity(const PricingInputs& in, const std::vector<double>& capacities,
                                const PriceCurve& min_curve);

/// Re-run the sizing study across generation coefficients: generation is
/// rescaled to each r (turbine cost scaling with implied capacity) and
/// the optimal battery is found per r. The market curve is shared.
std::vector<std::pair<double, ScenarioResult>>
cosize_generation(const PricingInputs& in, const TurbineModel& turbine,
                  const std::vector<double>& r_values, const std::vector<double>& capacities);

/// CSV dumps for the plot-data artifacts.
void write_price_range_csv(const std::filesystem::path& path, const PriceCurve& min_curve,
                           const PriceCurve& max_curve);
void write_sizing_csv(const std::filesystem::path& path, const std::vector<SizingRow>& rows);
void write_cosizing_csv(const std::filesystem::path& path,
                        const std::vector<std::pair<double, ScenarioResult>>& rows);

} // namespace bessim
