#include "bessim/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "bessim/csv.hpp"
#include "bessim/errors.hpp"

namespace bessim {

namespace {

std::vector<double> checked_grid(const std::vector<double>& capacities) {
    if (capacities.empty()) throw ConfigError("capacity grid is empty");
    std::vector<double> grid = capacities;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.front() != 0.0)
        throw ConfigError("capacity grid must include 0 (the no-battery baseline)");
    return grid;
}

} // namespace

double community_year_bill(const PricingInputs& in, double capacity_kwh) {
    if (capacity_kwh < 0.0) throw ConfigError("rented capacity must be nonnegative");
    const BatterySpec battery = BatterySpec::community(capacity_kwh);
    return chain_year(in.gen_kw, in.demand_kw, in.tariff, battery, in.controller)
        .objective_value;
}

PriceCurve max_price_curve(const PricingInputs& in, const std::vector<double>& capacities) {
    const std::vector<double> grid = checked_grid(capacities);
    const double base_cost = community_year_bill(in, 0.0) + in.turbine_cost_eur_per_year;
    PriceCurve curve;
    curve.points.reserve(grid.size());
    for (double c : grid) {
        const double cost =
            c == 0.0 ? base_cost : community_year_bill(in, c) + in.turbine_cost_eur_per_year;
        curve.points.emplace_back(c, base_cost - cost);
    }
    curve.validate();
    return curve;
}

PriceCurve min_price_curve(const PricingInputs& in, const std::vector<double>& capacities) {
    return opportunity_cost_curve(in.day_ahead_eur_kwh, in.full_market_capacity_kwh,
                                  checked_grid(capacities), in.market_eod_min_frac);
}

std::vector<FeasiblePoint> feasible_region(const PriceCurve& max_curve,
                                           const PriceCurve& min_curve) {
    max_curve.validate();
    min_curve.validate();
    if (max_curve.points.size() != min_curve.points.size())
        throw ConfigError("price curves are on different capacity grids");
    std::vector<FeasiblePoint> region;
    for (std::size_t i = 0; i < max_curve.points.size(); ++i) {
        const auto& [cap_max, hi] = max_curve.points[i];
        const auto& [cap_min, lo] = min_curve.points[i];
        if (cap_max != cap_min)
            throw ConfigError("price curves are on different capacity grids");
        if (hi > lo) region.push_back({cap_max, lo, hi});
    }
    return region;
}

std::vector<SizingRow> sizing_table(const PricingInputs& in,
                                    const std::vector<double>& capacities,
                                    const PriceCurve& min_curve) {
    const std::vector<double> grid = checked_grid(capacities);
    if (min_curve.points.size() != grid.size())
        throw ConfigError("minimum price curve does not match the capacity grid");
    std::vector<SizingRow> rows;
    rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (min_curve.points[i].first != grid[i])
            throw ConfigError("minimum price curve does not match the capacity grid");
        SizingRow row;
        row.capacity_kwh = grid[i];
        row.total_cost_eur = community_year_bill(in, grid[i]) + in.turbine_cost_eur_per_year +
                             min_curve.points[i].second;
        rows.push_back(row);
    }
    for (auto& row : rows) row.savings_eur = rows.front().total_cost_eur - row.total_cost_eur;
    return rows;
}

ScenarioResult optimal_capacity(const PricingInputs& in,
                                const std::vector<double>& capacities) {
    return optimal_capacity(in, capacities, min_price_curve(in, capacities));
}

ScenarioResult optimal_capacity(const PricingInputs& in, const std::vector<double>& capacities,
                                const PriceCurve& min_curve) {
    const auto rows = sizing_table(in, capacities, min_curve);
    const SizingRow* best = &rows.front();
    for (const auto& row : rows)
        if (row.total_cost_eur < best->total_cost_eur) best = &row; // ties keep the smaller C
    ScenarioResult result;
    result.annual_cost_eur = best->total_cost_eur;
    result.annual_savings_eur = best->savings_eur;
    result.optimal_capacity_kwh = best->capacity_kwh;
    result.tariff_label = in.tariff_label;
    result.r_gen = generation_coefficient(in.gen_kw, in.demand_kw);
    return result;
}

std::vector<std::pair<double, ScenarioResult>>
cosize_generation(const PricingInputs& in, const TurbineModel& turbine,
                  const std::vector<double>& r_values, const std::vector<double>& capacities) {
    for (double r : r_values)
        if (r < 0.0) throw ConfigError("generation coefficients must be nonnegative");
    // The operator's opportunity cost is independent of the community's
    // generation scale, so the market sweep is shared across r values.
    const PriceCurve min_curve = min_price_curve(in, capacities);
    std::vector<std::pair<double, ScenarioResult>> results;
    results.reserve(r_values.size());
    for (double r : r_values) {
        const ScaledGeneration scaled =
            scale_to_coefficient(in.gen_kw, in.demand_kw, r, turbine);
        PricingInputs ri = in;
        ri.gen_kw = scaled.gen;
        ri.turbine_cost_eur_per_year = scaled.annual_cost_eur;
        results.emplace_back(r, optimal_capacity(ri, capacities, min_curve));
    }
    return results;
}

void write_price_range_csv(const std::filesystem::path& path, const PriceCurve& min_curve,
                           const PriceCurve& max_curve) {
    if (min_curve.points.size() != max_curve.points.size())
        throw ConfigError("price curves are on different capacity grids");
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write '" + path.string() + "'");
    out << "capacity_kwh,min_price_eur_per_year,max_price_eur_per_year\n";
    for (std::size_t i = 0; i < min_curve.points.size(); ++i) {
        if (min_curve.points[i].first != max_curve.points[i].first)
            throw ConfigError("price curves are on different capacity grids");
        out << format_double(min_curve.points[i].first) << ','
            << format_double(min_curve.points[i].second) << ','
            << format_double(max_curve.points[i].second) << '\n';
    }
    if (!out) throw LoadError("write failed for '" + path.string() + "'");
}

void write_sizing_csv(const std::filesystem::path& path, const std::vector<SizingRow>& rows) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write '" + path.string() + "'");
    out << "capacity_kwh,total_cost_eur,savings_eur\n";
    for (const auto& row : rows)
        out << format_double(row.capacity_kwh) << ',' << format_double(row.total_cost_eur)
            << ',' << format_double(row.savings_eur) << '\n';
    if (!out) throw LoadError("write failed for '" + path.string() + "'");
}

void write_cosizing_csv(const std::filesystem::path& path,
                        const std::vector<std::pair<double, ScenarioResult>>& rows) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write '" + path.string() + "'");
    out << "r_gen,optimal_capacity_kwh,total_cost_eur\n";
    for (const auto& [r, result] : rows)
        out << format_double(r) << ',' << format_double(result.optimal_capacity_kwh) << ','
            << format_double(result.annual_cost_eur) << '\n';
    if (!out) throw LoadError("write failed for '" + path.string() + "'");
}

} // namespace bessim
