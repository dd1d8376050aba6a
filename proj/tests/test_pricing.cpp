#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <vector>

#include "bessim/errors.hpp"
#include "bessim/pricing.hpp"

using namespace bessim;

namespace {

TimeSeries series(std::vector<double> values, Unit unit, double step_hours = 0.5) {
    TimeSeries ts;
    ts.start_epoch_s = 0;
    ts.step_hours = step_hours;
    ts.unit = unit;
    ts.values = std::move(values);
    return ts;
}

TariffSchedule flat_tariff(double buy, double sell, std::size_t n) {
    TariffSchedule t;
    t.buy = series(std::vector<double>(n, buy), Unit::EurPerKilowattHour);
    t.sell = series(std::vector<double>(n, sell), Unit::EurPerKilowattHour);
    return t;
}

// Two identical days: a 2 h / 4 kW generation surplus (steps 0-3), then a
// 2 h / 4 kW demand block (steps 4-7). Feed-in pays nothing, so every kWh
// the battery shifts displaces a 0.40 import. For C <= 8 the charge window
// is power-limited (p_max = C/2), hence the bill savings are exactly
// 2 days * 0.40 * eta_c * eta_d * C = 0.6984 C.
PricingInputs shifting_inputs() {
    std::vector<double> g(96, 0.0), d(96, 0.0), da(96, 0.0);
    for (int day = 0; day < 2; ++day) {
        for (int i = 0; i < 4; ++i) g[static_cast<std::size_t>(48 * day + i)] = 4.0;
        for (int i = 4; i < 8; ++i) d[static_cast<std::size_t>(48 * day + i)] = 4.0;
        // Day-ahead: 12 h valley at 0.05, 12 h peak at 0.25. The market
        // optimum is one full cycle per day, linear in fleet capacity.
        for (int i = 0; i < 48; ++i)
            da[static_cast<std::size_t>(48 * day + i)] = i < 24 ? 0.05 : 0.25;
    }
    PricingInputs in;
    in.gen_kw = series(std::move(g), Unit::Kilowatt);
    in.demand_kw = series(std::move(d), Unit::Kilowatt);
    in.tariff = flat_tariff(0.40, 0.0, 96);
    in.tariff_label = "flat-0.40";
    in.day_ahead_eur_kwh = series(std::move(da), Unit::EurPerKilowattHour);
    in.full_market_capacity_kwh = 10.0;
    in.turbine_cost_eur_per_year = 1.0;
    return in;
}

// No generation, flat retail prices, constant day-ahead price: a battery
// of any size is worthless to both sides.
PricingInputs worthless_inputs() {
    PricingInputs in;
    in.gen_kw = series(std::vector<double>(96, 0.0), Unit::Kilowatt);
    in.demand_kw = series(std::vector<double>(96, 2.0), Unit::Kilowatt);
    in.tariff = flat_tariff(0.30, 0.10, 96);
    in.tariff_label = "flat-0.30";
    in.day_ahead_eur_kwh = series(std::vector<double>(96, 0.20), Unit::EurPerKilowattHour);
    in.full_market_capacity_kwh = 10.0;
    in.turbine_cost_eur_per_year = 0.5;
    return in;
}

const std::vector<double> kGrid{0.0, 2.0, 4.0, 8.0};

// Per-kWh slopes of the two price curves in shifting_inputs().
constexpr double kMaxSlope = 2.0 * 0.40 * 0.90 * 0.97;       // 0.6984
constexpr double kMinSlope = 2.0 * (0.25 - 0.05 / 0.87);     // 0.38505747...

} // namespace

TEST_CASE("maximum price is the yearly-cost saving over the no-battery baseline") {
    auto in = shifting_inputs();
    auto curve = max_price_curve(in, kGrid);
    REQUIRE(curve.points.size() == 4);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].first == kGrid[i]);
        CHECK(curve.points[i].second ==
              doctest::Approx(kMaxSlope * kGrid[i]).epsilon(1e-5));
    }

    // The fixed turbine amortization cancels out of the difference.
    auto free_turbine = in;
    free_turbine.turbine_cost_eur_per_year = 0.0;
    auto curve2 = max_price_curve(free_turbine, kGrid);
    for (std::size_t i = 0; i < curve.points.size(); ++i)
        CHECK(curve.points[i].second ==
              doctest::Approx(curve2.points[i].second).epsilon(1e-9));

    CHECK_THROWS_AS(max_price_curve(in, {2.0, 4.0}), ConfigError); // no baseline
    CHECK_THROWS_AS(max_price_curve(in, {}), ConfigError);
    CHECK_THROWS_AS(community_year_bill(in, -1.0), ConfigError);
}

TEST_CASE("minimum price is the operator's forgone day-ahead profit") {
    auto in = shifting_inputs();
    auto curve = min_price_curve(in, kGrid);
    REQUIRE(curve.points.size() == 4);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].first == kGrid[i]);
        CHECK(curve.points[i].second ==
              doctest::Approx(kMinSlope * kGrid[i]).epsilon(1e-6));
    }
}

TEST_CASE("feasible region keeps capacities where the community outbids the operator") {
    auto in = shifting_inputs();
    auto region = feasible_region(max_price_curve(in, kGrid), min_price_curve(in, kGrid));
    REQUIRE(region.size() == 3); // every positive capacity clears
    for (std::size_t i = 0; i < region.size(); ++i) {
        CHECK(region[i].capacity_kwh == kGrid[i + 1]);
        CHECK(region[i].price_low_eur ==
              doctest::Approx(kMinSlope * region[i].capacity_kwh).epsilon(1e-6));
        CHECK(region[i].price_high_eur ==
              doctest::Approx(kMaxSlope * region[i].capacity_kwh).epsilon(1e-5));
        CHECK(region[i].price_low_eur < region[i].price_high_eur);
    }

    PriceCurve a, b;
    a.points = {{0.0, 0.0}, {5.0, 1.0}};
    b.points = a.points;
    CHECK(feasible_region(a, b).empty()); // max == min: no strict surplus

    b.points = {{0.0, 0.0}, {6.0, 1.0}};
    CHECK_THROWS_AS(feasible_region(a, b), ConfigError); // mismatched grids
    b.points = {{0.0, 0.0}};
    CHECK_THROWS_AS(feasible_region(a, b), ConfigError);
}

TEST_CASE("worthless battery: both curves vanish and the tie breaks to zero capacity") {
    auto in = worthless_inputs();
    auto max_curve = max_price_curve(in, kGrid);
    auto min_curve = min_price_curve(in, kGrid);
    for (std::size_t i = 0; i < kGrid.size(); ++i) {
        CHECK(max_curve.points[i].second == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(min_curve.points[i].second == doctest::Approx(0.0).epsilon(1e-9));
    }
    CHECK(feasible_region(max_curve, min_curve).empty());

    // Every capacity costs the same, so the scan must keep the smallest.
    auto best = optimal_capacity(in, kGrid);
    CHECK(best.optimal_capacity_kwh == 0.0);
    CHECK(best.annual_savings_eur == doctest::Approx(0.0).epsilon(1e-9));
    const double no_battery = 96.0 * 0.5 * 2.0 * 0.30 + 0.5; // bill + turbine
    CHECK(best.annual_cost_eur == doctest::Approx(no_battery).epsilon(1e-9));
    CHECK(best.tariff_label == "flat-0.30");
    CHECK(best.r_gen == 0.0);
}

TEST_CASE("sizing table prices rental at the operator minimum and finds the optimum") {
    auto in = shifting_inputs();
    auto min_curve = min_price_curve(in, kGrid);
    auto rows = sizing_table(in, kGrid, min_curve);
    REQUIRE(rows.size() == 4);
    const double base = 6.40 + 1.0; // two days of 3.20 imports + turbine
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double c = kGrid[i];
        CHECK(rows[i].capacity_kwh == c);
        CHECK(rows[i].total_cost_eur ==
              doctest::Approx(base - (kMaxSlope - kMinSlope) * c).epsilon(1e-5));
        CHECK(rows[i].savings_eur ==
              doctest::Approx((kMaxSlope - kMinSlope) * c).epsilon(1e-5));
    }

    auto best = optimal_capacity(in, kGrid, min_curve);
    CHECK(best.optimal_capacity_kwh == 8.0);
    CHECK(best.annual_cost_eur == doctest::Approx(base - (kMaxSlope - kMinSlope) * 8.0)
                                      .epsilon(1e-5));
    CHECK(best.annual_savings_eur ==
          doctest::Approx((kMaxSlope - kMinSlope) * 8.0).epsilon(1e-5));
    CHECK(best.tariff_label == "flat-0.40");
    CHECK(best.r_gen == doctest::Approx(1.0).epsilon(1e-12)); // 16 kWh gen, 16 kWh demand

    PriceCurve stale = min_curve;
    stale.points.pop_back();
    CHECK_THROWS_AS(sizing_table(in, kGrid, stale), ConfigError);
    stale = min_curve;
    stale.points[1].first = 3.0;
    CHECK_THROWS_AS(sizing_table(in, kGrid, stale), ConfigError);
}

TEST_CASE("cosizing rescales generation and turbine cost per coefficient") {
    auto in = shifting_inputs();
    TurbineModel toy;
    toy.capacity_kw = 4.0;
    toy.price_per_kw = 10.0;
    toy.amortization_years = 20.0; // cost = 2 EUR/yr at r = 1

    auto results = cosize_generation(in, toy, {0.0, 0.5, 1.0}, kGrid);
    REQUIRE(results.size() == 3);

    // r = 0: no generation, free turbine, battery useless under a flat
    // tariff; renting any capacity only adds the operator's fee.
    CHECK(results[0].first == 0.0);
    CHECK(results[0].second.optimal_capacity_kwh == 0.0);
    CHECK(results[0].second.annual_cost_eur == doctest::Approx(6.40).epsilon(1e-9));
    CHECK(results[0].second.annual_savings_eur == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(results[0].second.r_gen == 0.0);

    // r = 0.5: the surplus window only supports 2 kW of charging, so 4 kWh
    // already captures everything and 8 kWh would pay rent for nothing.
    CHECK(results[1].first == 0.5);
    CHECK(results[1].second.optimal_capacity_kwh == 4.0);
    const double half_bill = 6.40 - 2.0 * 0.40 * 0.97 * 3.6; // SoC peaks at 3.6
    CHECK(results[1].second.annual_cost_eur ==
          doctest::Approx(half_bill + 1.0 + kMinSlope * 4.0).epsilon(1e-5));
    CHECK(results[1].second.r_gen == doctest::Approx(0.5).epsilon(1e-12));

    // r = 1: the original scenario with the toy turbine's 2 EUR/yr cost.
    CHECK(results[2].first == 1.0);
    CHECK(results[2].second.optimal_capacity_kwh == 8.0);
    CHECK(results[2].second.annual_cost_eur ==
          doctest::Approx(6.40 + 2.0 - (kMaxSlope - kMinSlope) * 8.0).epsilon(1e-5));
    CHECK(results[2].second.annual_savings_eur ==
          doctest::Approx((kMaxSlope - kMinSlope) * 8.0).epsilon(1e-5));
    CHECK(results[2].second.r_gen == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(cosize_generation(in, toy, {-0.1}, kGrid), ConfigError);
}

TEST_CASE("pricing csv writers emit one row per grid point") {
    PriceCurve lo, hi;
    lo.points = {{0.0, 0.0}, {20.0, 50.5}};
    hi.points = {{0.0, 0.0}, {20.0, 80.0}};
    auto dir = std::filesystem::temp_directory_path();

    auto range_path = dir / "bessim_price_range_test.csv";
    write_price_range_csv(range_path, lo, hi);
    {
        std::ifstream f(range_path);
        std::string line;
        std::getline(f, line);
        CHECK(line == "capacity_kwh,min_price_eur_per_year,max_price_eur_per_year");
        std::getline(f, line);
        CHECK(line == "0,0,0");
        std::getline(f, line);
        CHECK(line == "20,50.5,80");
        CHECK(!std::getline(f, line));
    }
    std::filesystem::remove(range_path);
    hi.points.push_back({40.0, 90.0});
    CHECK_THROWS_AS(write_price_range_csv(range_path, lo, hi), ConfigError);

    auto sizing_path = dir / "bessim_sizing_test.csv";
    write_sizing_csv(sizing_path, {{0.0, 100.0, 0.0}, {20.0, 87.5, 12.5}});
    {
        std::ifstream f(sizing_path);
        std::string line;
        std::getline(f, line);
        CHECK(line == "capacity_kwh,total_cost_eur,savings_eur");
        std::getline(f, line);
        CHECK(line == "0,100,0");
        std::getline(f, line);
        CHECK(line == "20,87.5,12.5");
        CHECK(!std::getline(f, line));
    }
    std::filesystem::remove(sizing_path);

    auto cosizing_path = dir / "bessim_cosizing_test.csv";
    ScenarioResult r;
    r.optimal_capacity_kwh = 40.0;
    r.annual_cost_eur = 321.25;
    write_cosizing_csv(cosizing_path, {{0.75, r}});
    {
        std::ifstream f(cosizing_path);
        std::string line;
        std::getline(f, line);
        CHECK(line == "r_gen,optimal_capacity_kwh,total_cost_eur");
        std::getline(f, line);
        CHECK(line == "0.75,40,321.25");
        CHECK(!std::getline(f, line));
    }
    std::filesystem::remove(cosizing_path);
}
