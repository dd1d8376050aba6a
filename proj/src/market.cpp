#include "bessim/market.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>

#include "bessim/csv.hpp"
#include "bessim/errors.hpp"
#include "bessim/simplex.hpp"

namespace bessim {

namespace {

constexpr double kCertGap = 1e-7;

void check_prices(const TimeSeries& prices) {
    if (prices.values.empty()) throw AlignmentError("day-ahead price series is empty");
    if (!prices.gap_free())
        throw AlignmentError("day-ahead price series has gaps; fill before scheduling");
    if (prices.unit != Unit::EurPerKilowattHour)
        throw ConfigError("market scheduler expects day-ahead prices in EUR/kWh");
    if (!(prices.step_hours > 0.0)) throw ConfigError("series step must be positive");
}

std::size_t steps_per_day(double step_hours) {
    double n = 24.0 / step_hours;
    double r = std::round(n);
    if (std::abs(n - r) > 1e-9 || r < 1.0)
        throw ConfigError("series step does not divide a day evenly");
    return static_cast<std::size_t>(r);
}

Schedule zero_schedule(const TimeSeries& prices, std::size_t T, double soc) {
    Schedule s;
    s.start_epoch_s = prices.start_epoch_s;
    s.step_hours = prices.step_hours;
    s.soc.assign(T + 1, soc);
    s.p_charge.assign(T, 0.0);
    s.p_discharge.assign(T, 0.0);
    s.e_buy.assign(T, 0.0);
    s.e_sell.assign(T, 0.0);
    return s;
}

} // namespace

void PriceCurve::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second))
            throw ValidationError("price curve contains a non-finite entry");
        if (i > 0 && points[i].first <= points[i - 1].first)
            throw ValidationError("price curve capacities must be strictly increasing");
    }
}

Schedule market_day_schedule(const TimeSeries& day_ahead, const BatterySpec& battery) {
    battery.validate();
    check_prices(day_ahead);
    const auto T = static_cast<int>(day_ahead.size());
    if (T > 48) throw ConfigError("market day solver is limited to 48 steps");
    const double dt = day_ahead.step_hours;
    // Imports and exports equal p*dt (Eqs. 2.3/2.4), so a finite per-step
    // energy bound is just another power bound.
    const double p_ub = std::isfinite(battery.e_max)
                            ? std::min(battery.p_max, battery.e_max / dt)
                            : battery.p_max;

    lp::Problem p;
    const int soc0 = 0;
    p.add_var(battery.soc_initial, battery.soc_initial);
    for (int i = 1; i <= T; ++i) p.add_var(battery.soc_min, battery.soc_max);
    const int pc0 = static_cast<int>(p.num_vars());
    for (int i = 0; i < T; ++i)
        p.add_var(0.0, p_ub, day_ahead.values[static_cast<std::size_t>(i)] * dt);
    const int pd0 = static_cast<int>(p.num_vars());
    for (int i = 0; i < T; ++i)
        p.add_var(0.0, p_ub, -day_ahead.values[static_cast<std::size_t>(i)] * dt);

    for (int i = 0; i < T; ++i) {
        // soc_{i+1} = soc_i + eta_cd dt p_c - dt p_d
        p.add_row(0.0, 0.0,
                  {{soc0 + i + 1, 1.0},
                   {soc0 + i, -1.0},
                   {pc0 + i, -battery.eta_cd * dt},
                   {pd0 + i, dt}},
                  "soc-recursion");
    }
    if (battery.soc_max > battery.soc_min) {
        std::vector<std::pair<int, double>> terms;
        terms.reserve(static_cast<std::size_t>(2 * T));
        for (int i = 0; i < T; ++i) {
            terms.emplace_back(pc0 + i, battery.eta_cd * dt);
            terms.emplace_back(pd0 + i, dt);
        }
        p.add_row(-lp::kInf, battery.cycle_budget_kwh(), std::move(terms), "cycle-cap");
    }
    if (battery.soc_eod_min_frac > 0.0)
        p.add_row(battery.soc_eod_min_frac * battery.soc_max, lp::kInf, {{soc0 + T, 1.0}},
                  "eod-min-soc");

    lp::Solution sol = lp::solve(p);
    switch (sol.status) {
    case lp::Status::Optimal: break;
    case lp::Status::Infeasible:
        throw InfeasibleError("market_day_schedule: infeasible (binding family: " +
                                  sol.infeasible_family + ")",
                              sol.infeasible_family);
    case lp::Status::Unbounded:
        throw Error("market_day_schedule: program is unbounded");
    case lp::Status::IterLimit:
        throw Error("market_day_schedule: simplex iteration limit reached");
    }
    if (!(sol.rel_gap <= kCertGap))
        throw Error("market_day_schedule: optimality certificate failed (relative gap " +
                    std::to_string(sol.rel_gap) + ")");

    Schedule s = zero_schedule(day_ahead, static_cast<std::size_t>(T), battery.soc_initial);
    double profit = 0.0;
    for (int i = 0; i <= T; ++i) s.soc[static_cast<std::size_t>(i)] = sol.x[soc0 + i];
    for (int i = 0; i < T; ++i) {
        const auto k = static_cast<std::size_t>(i);
        s.p_charge[k] = std::max(0.0, sol.x[pc0 + i]);
        s.p_discharge[k] = std::max(0.0, sol.x[pd0 + i]);
        s.e_buy[k] = s.p_charge[k] * dt;
        s.e_sell[k] = s.p_discharge[k] * dt;
        profit += day_ahead.values[k] * (s.e_sell[k] - s.e_buy[k]);
    }
    s.objective_value = profit;
    return s;
}

MarketResult market_year_profit(const TimeSeries& day_ahead, double capacity_kwh,
                                double soc_eod_min_frac) {
    check_prices(day_ahead);
    if (capacity_kwh < 0.0) throw ConfigError("market capacity must be nonnegative");
    const std::size_t day = steps_per_day(day_ahead.step_hours);
    std::size_t T = day_ahead.size();
    if (T % day != 0) {
        std::cerr << "warning: market_year_profit truncating " << (T % day)
                  << " trailing steps (partial day)\n";
        T -= T % day;
    }
    if (T == 0) throw ConfigError("market_year_profit needs at least one full day of prices");

    MarketResult out;
    out.capacity_kwh = capacity_kwh;
    if (capacity_kwh == 0.0) {
        out.schedule = zero_schedule(day_ahead, T, 0.0);
        return out;
    }

    BatterySpec battery = BatterySpec::community(capacity_kwh);
    battery.soc_eod_min_frac = soc_eod_min_frac;
    battery.validate();

    Schedule s = zero_schedule(day_ahead, T, battery.soc_initial);
    for (std::size_t t = 0; t < T; t += day) {
        BatterySpec bd = battery;
        bd.soc_initial = std::clamp(s.soc[t], battery.soc_min, battery.soc_max);
        Schedule ds;
        try {
            ds = market_day_schedule(slice(day_ahead, t, day), bd);
        } catch (const InfeasibleError& e) {
            throw InfeasibleError("day " + std::to_string(t / day + 1) + ": " + e.what(),
                                  e.family);
        }
        for (std::size_t j = 0; j < day; ++j) {
            s.p_charge[t + j] = ds.p_charge[j];
            s.p_discharge[t + j] = ds.p_discharge[j];
            s.e_buy[t + j] = ds.e_buy[j];
            s.e_sell[t + j] = ds.e_sell[j];
            s.soc[t + j + 1] = ds.soc[j + 1];
        }
        out.profit_eur += ds.objective_value;
    }
    s.objective_value = out.profit_eur;
    validate_market_schedule(s, battery, true);
    out.schedule = std::move(s);
    return out;
}

PriceCurve opportunity_cost_curve(const TimeSeries& day_ahead, double full_capacity_kwh,
                                  const std::vector<double>& rented_capacities,
                                  double soc_eod_min_frac) {
    if (full_capacity_kwh < 0.0) throw ConfigError("full capacity must be nonnegative");
    std::vector<double> caps = rented_capacities;
    std::sort(caps.begin(), caps.end());
    caps.erase(std::unique(caps.begin(), caps.end()), caps.end());
    for (double c : caps)
        if (c < 0.0 || c > full_capacity_kwh)
            throw ConfigError("rented capacity " + std::to_string(c) +
                              " is outside [0, full capacity]");

    const double base = market_year_profit(day_ahead, full_capacity_kwh, soc_eod_min_frac)
                            .profit_eur;
    PriceCurve curve;
    curve.points.reserve(caps.size());
    for (double c : caps) {
        const double residual =
            c == 0.0 ? base
                     : market_year_profit(day_ahead, full_capacity_kwh - c, soc_eod_min_frac)
                           .profit_eur;
        curve.points.emplace_back(c, base - residual);
    }
    curve.validate();
    return curve;
}

void validate_market_schedule(const Schedule& s, const BatterySpec& battery,
                              bool check_daily_cycle_cap) {
    constexpr double tol = 1e-6;
    const std::size_t T = s.size();
    const double dt = s.step_hours;
    const auto fail = [](std::size_t i, const std::string& what) {
        throw ValidationError("market schedule invariant violated at step " + std::to_string(i) +
                              ": " + what);
    };
    if (s.soc.size() != T + 1 || s.p_discharge.size() != T || s.e_buy.size() != T ||
        s.e_sell.size() != T)
        throw ValidationError("market schedule vectors have inconsistent lengths");
    if (std::abs(s.soc[0] - battery.soc_initial) > tol)
        fail(0, "initial SoC differs from battery.soc_initial");

    for (std::size_t i = 0; i < T; ++i) {
        if (s.soc[i + 1] < battery.soc_min - tol || s.soc[i + 1] > battery.soc_max + tol)
            fail(i, "SoC out of [soc_min, soc_max]");
        if (s.p_charge[i] < -tol || s.p_charge[i] > battery.p_max + tol)
            fail(i, "p_charge out of [0, p_max]");
        if (s.p_discharge[i] < -tol || s.p_discharge[i] > battery.p_max + tol)
            fail(i, "p_discharge out of [0, p_max]");
        if (std::abs(s.e_buy[i] - s.p_charge[i] * dt) > tol)
            fail(i, "import does not equal charging energy");
        if (std::abs(s.e_sell[i] - s.p_discharge[i] * dt) > tol)
            fail(i, "export does not equal discharging energy");
        const double rec = s.soc[i + 1] - s.soc[i] - battery.eta_cd * dt * s.p_charge[i] +
                           dt * s.p_discharge[i];
        if (std::abs(rec) > tol) fail(i, "market SoC recursion violated");
    }

    if (check_daily_cycle_cap && battery.soc_max > battery.soc_min) {
        const std::size_t day = steps_per_day(dt);
        const double budget = battery.cycle_budget_kwh();
        for (std::size_t t = 0; t < T; t += day) {
            double used = 0.0;
            for (std::size_t j = t; j < std::min(t + day, T); ++j)
                used += battery.eta_cd * dt * s.p_charge[j] + dt * s.p_discharge[j];
            if (used > budget + tol * (1.0 + budget))
                fail(t, "daily cycle cap exceeded (" + std::to_string(used) + " kWh > " +
                            std::to_string(budget) + " kWh)");
        }
    }
}

void write_price_curve_csv(const std::filesystem::path& path, const PriceCurve& curve) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write '" + path.string() + "'");
    out << "capacity_kwh,eur_per_year\n";
    for (const auto& [cap, eur] : curve.points)
        out << format_double(cap) << ',' << format_double(eur) << '\n';
    if (!out) throw LoadError("write failed for '" + path.string() + "'");
}

} // namespace bessim
