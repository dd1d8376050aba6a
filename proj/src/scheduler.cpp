#include "bessim/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "bessim/csv.hpp"
#include "bessim/errors.hpp"
#include "bessim/simplex.hpp"

namespace bessim {

namespace {

constexpr double kCertGap = 1e-7; // required relative primal-dual gap

void check_power_pair(const TimeSeries& gen, const TimeSeries& demand) {
    if (gen.values.empty()) throw AlignmentError("generation series is empty");
    if (!gen.aligned_with(demand))
        throw AlignmentError("generation and demand series are not aligned");
    if (!gen.gap_free() || !demand.gap_free())
        throw AlignmentError("generation/demand series have gaps; fill before scheduling");
    if (gen.unit != Unit::Kilowatt || demand.unit != Unit::Kilowatt)
        throw ConfigError("scheduler expects generation and demand in kW");
    if (!(gen.step_hours > 0.0)) throw ConfigError("series step must be positive");
}

void check_tariff_covers(const TariffSchedule& tariff, const TimeSeries& gen) {
    const TimeSeries& b = tariff.buy;
    const TimeSeries& s = tariff.sell;
    if (b.start_epoch_s != gen.start_epoch_s || b.step_seconds() != gen.step_seconds() ||
        b.size() < gen.size() || s.size() < gen.size())
        throw AlignmentError("tariff schedule does not cover the dispatch horizon");
}

std::size_t steps_per_day(double step_hours) {
    double n = 24.0 / step_hours;
    double r = std::round(n);
    if (std::abs(n - r) > 1e-9 || r < 1.0)
        throw ConfigError("series step does not divide a day evenly");
    return static_cast<std::size_t>(r);
}

Schedule empty_schedule(const TimeSeries& gen) {
    Schedule s;
    s.start_epoch_s = gen.start_epoch_s;
    s.step_hours = gen.step_hours;
    const std::size_t T = gen.size();
    s.soc.assign(T + 1, 0.0);
    s.p_charge.assign(T, 0.0);
    s.p_discharge.assign(T, 0.0);
    s.e_buy.assign(T, 0.0);
    s.e_sell.assign(T, 0.0);
    return s;
}

TariffSchedule slice_tariff(const TariffSchedule& tariff, std::size_t first, std::size_t count) {
    TariffSchedule out;
    out.buy = slice(tariff.buy, first, count);
    out.sell = slice(tariff.sell, first, count);
    out.kind = tariff.kind;
    return out;
}

// Variable layout of the one-day LP/MILP: SoC at every step boundary,
// then the four per-step decision blocks.
struct DayLpLayout {
    int T = 0;
    int soc0 = 0;
    int pc0 = 0, pd0 = 0, eb0 = 0, es0 = 0;
};

lp::Problem build_day_lp(const TimeSeries& gen, const TimeSeries& demand,
                         const TariffSchedule& tariff, const BatterySpec& battery,
                         const SolveOptions& opts, DayLpLayout& layout) {
    const int T = static_cast<int>(gen.size());
    const double dt = gen.step_hours;
    lp::Problem p;

    layout.T = T;
    layout.soc0 = 0;
    const double soc_cost = opts.use_l2 ? -battery.lambda_capacity : 0.0;
    p.add_var(battery.soc_initial, battery.soc_initial);
    for (int i = 1; i <= T; ++i)
        p.add_var(battery.soc_min, battery.soc_max, i == T ? soc_cost : 0.0);

    const double p_cost = opts.use_l1 ? battery.lambda_charging : 0.0;
    layout.pc0 = static_cast<int>(p.num_vars());
    for (int i = 0; i < T; ++i) p.add_var(0.0, battery.p_max, p_cost);
    layout.pd0 = static_cast<int>(p.num_vars());
    for (int i = 0; i < T; ++i) p.add_var(0.0, battery.p_max, p_cost);
    layout.eb0 = static_cast<int>(p.num_vars());
    for (int i = 0; i < T; ++i) p.add_var(0.0, battery.e_max, tariff.buy.values[i]);
    layout.es0 = static_cast<int>(p.num_vars());
    for (int i = 0; i < T; ++i) p.add_var(0.0, battery.e_max, -tariff.sell.values[i]);

    for (int i = 0; i < T; ++i) {
        // soc_{i+1} = soc_i + eta_c dt p_c - dt/eta_d p_d
        p.add_row(0.0, 0.0,
                  {{layout.soc0 + i + 1, 1.0},
                   {layout.soc0 + i, -1.0},
                   {layout.pc0 + i, -battery.eta_c * dt},
                   {layout.pd0 + i, dt / battery.eta_d}},
                  "soc-recursion");
        // (p_c - p_d) dt - e_b + e_s = (g - d) dt, i.e. the battery and the
        // grid absorb exactly the step's surplus or deficit.
        p.add_row((gen.values[i] - demand.values[i]) * dt, (gen.values[i] - demand.values[i]) * dt,
                  {{layout.pc0 + i, dt},
                   {layout.pd0 + i, -dt},
                   {layout.eb0 + i, -1.0},
                   {layout.es0 + i, 1.0}},
                  "power-balance");
    }

    if (battery.soc_max > battery.soc_min) {
        std::vector<std::pair<int, double>> terms;
        terms.reserve(static_cast<std::size_t>(2 * T));
        for (int i = 0; i < T; ++i) {
            terms.emplace_back(layout.pc0 + i, battery.eta_c * dt);
            terms.emplace_back(layout.pd0 + i, dt / battery.eta_d);
        }
        p.add_row(-lp::kInf, battery.cycle_budget_kwh(), std::move(terms), "cycle-cap");
    }

    const double eod_frac = std::max(battery.soc_eod_min_frac, opts.eod_min_frac);
    if (eod_frac > 0.0)
        p.add_row(eod_frac * battery.soc_max, lp::kInf, {{layout.soc0 + T, 1.0}}, "eod-min-soc");

    return p;
}

void require_certified(const lp::Solution& sol, const char* what) {
    switch (sol.status) {
    case lp::Status::Optimal: break;
    case lp::Status::Infeasible:
        throw InfeasibleError(std::string(what) + ": infeasible (binding family: " +
                                  sol.infeasible_family + ")",
                              sol.infeasible_family);
    case lp::Status::Unbounded:
        throw Error(std::string(what) + ": program is unbounded; check tariff signs");
    case lp::Status::IterLimit:
        throw Error(std::string(what) + ": simplex iteration limit reached");
    }
    if (!(sol.rel_gap <= kCertGap))
        throw Error(std::string(what) + ": optimality certificate failed (relative gap " +
                    std::to_string(sol.rel_gap) + ")");
}

Schedule extract_schedule(const lp::Solution& sol, const DayLpLayout& layout,
                          const TimeSeries& gen, const TariffSchedule& tariff) {
    Schedule s = empty_schedule(gen);
    for (int i = 0; i <= layout.T; ++i) s.soc[static_cast<std::size_t>(i)] = sol.x[layout.soc0 + i];
    double obj = 0.0;
    for (int i = 0; i < layout.T; ++i) {
        const auto k = static_cast<std::size_t>(i);
        s.p_charge[k] = std::max(0.0, sol.x[layout.pc0 + i]);
        s.p_discharge[k] = std::max(0.0, sol.x[layout.pd0 + i]);
        s.e_buy[k] = std::max(0.0, sol.x[layout.eb0 + i]);
        s.e_sell[k] = std::max(0.0, sol.x[layout.es0 + i]);
        obj += tariff.buy.values[k] * s.e_buy[k] - tariff.sell.values[k] * s.e_sell[k];
    }
    s.objective_value = obj;
    return s;
}

void check_day_inputs(const TimeSeries& gen, const TimeSeries& demand,
                      const TariffSchedule& tariff, const BatterySpec& battery) {
    battery.validate();
    check_power_pair(gen, demand);
    check_tariff_covers(tariff, gen);
    if (gen.size() > 48)
        throw ConfigError("day solver horizon is limited to 48 steps; use chain_year for "
                          "longer series");
}

} // namespace

Schedule greedy_schedule(const TimeSeries& gen, const TimeSeries& demand,
                         const BatterySpec& battery) {
    battery.validate();
    check_power_pair(gen, demand);
    const double dt = gen.step_hours;
    const std::size_t day = steps_per_day(dt);
    const std::size_t T = gen.size();

    Schedule s = empty_schedule(gen);
    s.soc[0] = battery.soc_initial;
    double budget = 0.0;
    for (std::size_t i = 0; i < T; ++i) {
        if (i % day == 0) budget = battery.cycle_budget_kwh();
        const double g = gen.values[i];
        const double d = demand.values[i];
        const double soc = s.soc[i];
        if (g > d) {
            const double want_kw = std::min(g - d, battery.p_max);
            double dsoc = std::min(want_kw * battery.eta_c * dt,
                                   std::min(battery.soc_max - soc, budget));
            dsoc = std::max(dsoc, 0.0);
            const double pc = dsoc / (battery.eta_c * dt);
            s.p_charge[i] = pc;
            s.e_sell[i] = std::max(0.0, (g - d - pc) * dt);
            s.soc[i + 1] = soc + dsoc;
            budget -= dsoc;
        } else if (d > g) {
            const double want_kw = std::min(d - g, battery.p_max);
            double drop = std::min(want_kw * dt / battery.eta_d,
                                   std::min(soc - battery.soc_min, budget));
            drop = std::max(drop, 0.0);
            const double pd = drop * battery.eta_d / dt;
            s.p_discharge[i] = pd;
            s.e_buy[i] = std::max(0.0, (d - g - pd) * dt);
            s.soc[i + 1] = soc - drop;
            budget -= drop;
        } else {
            s.soc[i + 1] = soc;
        }
    }
    return s;
}

Schedule lp_day_schedule(const TimeSeries& gen, const TimeSeries& demand,
                         const TariffSchedule& tariff, const BatterySpec& battery,
                         const SolveOptions& opts) {
    check_day_inputs(gen, demand, tariff, battery);
    DayLpLayout layout;
    lp::Problem p = build_day_lp(gen, demand, tariff, battery, opts, layout);
    lp::Solution sol = lp::solve(p);
    require_certified(sol, "lp_day_schedule");
    return extract_schedule(sol, layout, gen, tariff);
}

Schedule milp_day_schedule(const TimeSeries& gen, const TimeSeries& demand,
                           const TariffSchedule& tariff, const BatterySpec& battery,
                           const SolveOptions& opts) {
    check_day_inputs(gen, demand, tariff, battery);
    DayLpLayout layout;
    lp::Problem p = build_day_lp(gen, demand, tariff, battery, opts, layout);
    const int T = layout.T;
    const double dt = gen.step_hours;

    // Big-M for the import/export exclusivity rows: with e_max unbounded,
    // no optimal step trades more than the battery's step energy plus the
    // largest surplus/deficit.
    double m_energy = battery.e_max;
    if (!std::isfinite(m_energy)) {
        double worst = 0.0;
        for (int i = 0; i < T; ++i) {
            const auto k = static_cast<std::size_t>(i);
            worst = std::max(worst, std::abs(gen.values[k] - demand.values[k]));
        }
        m_energy = battery.p_max * dt + worst * dt;
    }

    std::vector<int> binaries;
    binaries.reserve(static_cast<std::size_t>(2 * T));
    for (int i = 0; i < T; ++i) {
        const int x = p.add_var(0.0, 1.0); // 1 while discharging
        const int y = p.add_var(0.0, 1.0); // 1 while exporting
        binaries.push_back(x);
        binaries.push_back(y);
        p.add_row(-lp::kInf, battery.p_max, {{layout.pc0 + i, 1.0}, {x, battery.p_max}},
                  "exclusivity");
        p.add_row(-lp::kInf, 0.0, {{layout.pd0 + i, 1.0}, {x, -battery.p_max}}, "exclusivity");
        p.add_row(-lp::kInf, m_energy, {{layout.eb0 + i, 1.0}, {y, m_energy}}, "exclusivity");
        p.add_row(-lp::kInf, 0.0, {{layout.es0 + i, 1.0}, {y, -m_energy}}, "exclusivity");
    }

    lp::Solution sol = lp::solve_mip(p, binaries);
    require_certified(sol, "milp_day_schedule");
    Schedule s = extract_schedule(sol, layout, gen, tariff);
    // The binaries force one side of each pair to zero; snap roundoff so
    // downstream exclusivity checks can be exact.
    for (int i = 0; i < T; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (s.p_charge[k] < 1e-9) s.p_charge[k] = 0.0;
        if (s.p_discharge[k] < 1e-9) s.p_discharge[k] = 0.0;
        if (s.e_buy[k] < 1e-9) s.e_buy[k] = 0.0;
        if (s.e_sell[k] < 1e-9) s.e_sell[k] = 0.0;
    }
    return s;
}

Schedule rolling_horizon_schedule(const TimeSeries& gen, const TimeSeries& demand,
                                  const TariffSchedule& tariff, const BatterySpec& battery,
                                  const SolveOptions& opts) {
    battery.validate();
    check_power_pair(gen, demand);
    check_tariff_covers(tariff, gen);
    if (opts.rolling_period_steps < 1 || opts.horizon_steps < opts.rolling_period_steps)
        throw ConfigError("rolling horizon requires 1 <= period <= horizon");
    if (opts.horizon_steps > 48)
        throw ConfigError("rolling horizon lookahead is limited to 48 steps");

    const std::size_t T = gen.size();
    const auto period = static_cast<std::size_t>(opts.rolling_period_steps);
    const auto horizon = static_cast<std::size_t>(opts.horizon_steps);

    Schedule s = empty_schedule(gen);
    s.soc[0] = battery.soc_initial;
    SolveOptions window_opts = opts;
    window_opts.mode = ControllerMode::Lp;

    for (std::size_t t = 0; t < T; t += period) {
        const std::size_t w = std::min(horizon, T - t);
        BatterySpec bw = battery;
        // Solver roundoff on the carried SoC must not trip validate().
        bw.soc_initial = std::clamp(s.soc[t], battery.soc_min, battery.soc_max);
        Schedule win;
        try {
            win = lp_day_schedule(slice(gen, t, w), slice(demand, t, w),
                                  slice_tariff(tariff, t, w), bw, window_opts);
        } catch (const InfeasibleError& e) {
            throw InfeasibleError("rolling window at step " + std::to_string(t) + ": " + e.what(),
                                  e.family);
        }
        const std::size_t commit = std::min(period, T - t);
        for (std::size_t j = 0; j < commit; ++j) {
            s.p_charge[t + j] = win.p_charge[j];
            s.p_discharge[t + j] = win.p_discharge[j];
            s.e_buy[t + j] = win.e_buy[j];
            s.e_sell[t + j] = win.e_sell[j];
            s.soc[t + j + 1] = win.soc[j + 1];
        }
    }
    s.objective_value = bill(s, tariff);
    return s;
}

Schedule chain_year(const TimeSeries& gen, const TimeSeries& demand, const TariffSchedule& tariff,
                    const BatterySpec& battery, const SolveOptions& opts) {
    battery.validate();
    check_power_pair(gen, demand);
    check_tariff_covers(tariff, gen);
    const std::size_t day = steps_per_day(gen.step_hours);
    std::size_t T = gen.size();
    if (T % day != 0) {
        std::cerr << "warning: chain_year truncating " << (T % day)
                  << " trailing steps (partial day)\n";
        T -= T % day;
    }
    if (T == 0) throw ConfigError("chain_year needs at least one full day of data");

    const TimeSeries g = slice(gen, 0, T);
    const TimeSeries d = slice(demand, 0, T);
    const TariffSchedule tf = slice_tariff(tariff, 0, T);

    Schedule s;
    switch (opts.mode) {
    case ControllerMode::Greedy: s = greedy_schedule(g, d, battery); break;
    case ControllerMode::Rolling: s = rolling_horizon_schedule(g, d, tf, battery, opts); break;
    case ControllerMode::Lp:
    case ControllerMode::Milp: {
        s = empty_schedule(g);
        s.soc[0] = battery.soc_initial;
        for (std::size_t t = 0; t < T; t += day) {
            const std::size_t k = t / day + 1;
            BatterySpec bd = battery;
            bd.soc_initial = std::clamp(s.soc[t], battery.soc_min, battery.soc_max);
            Schedule ds;
            try {
                const TimeSeries dg = slice(g, t, day);
                const TimeSeries dd = slice(d, t, day);
                const TariffSchedule dtf = slice_tariff(tf, t, day);
                ds = opts.mode == ControllerMode::Lp
                         ? lp_day_schedule(dg, dd, dtf, bd, opts)
                         : milp_day_schedule(dg, dd, dtf, bd, opts);
            } catch (const InfeasibleError& e) {
                throw InfeasibleError("day " + std::to_string(k) + ": " + e.what(), e.family);
            } catch (const SolverTimeoutError& e) {
                throw SolverTimeoutError("day " + std::to_string(k) + ": " + e.what(), e.incumbent,
                                         e.gap);
            }
            for (std::size_t j = 0; j < day; ++j) {
                s.p_charge[t + j] = ds.p_charge[j];
                s.p_discharge[t + j] = ds.p_discharge[j];
                s.e_buy[t + j] = ds.e_buy[j];
                s.e_sell[t + j] = ds.e_sell[j];
                s.soc[t + j + 1] = ds.soc[j + 1];
            }
        }
        break;
    }
    }
    s.objective_value = bill(s, tf);
    validate_community_schedule(s, g, d, battery, opts.mode != ControllerMode::Rolling);
    return s;
}

double bill(const Schedule& schedule, const TariffSchedule& tariff) {
    const std::size_t T = schedule.size();
    if (tariff.buy.size() < T || tariff.sell.size() < T)
        throw AlignmentError("tariff schedule is shorter than the dispatch schedule");
    if (tariff.buy.start_epoch_s != schedule.start_epoch_s)
        throw AlignmentError("tariff and schedule start at different times");
    double total = 0.0;
    for (std::size_t i = 0; i < T; ++i)
        total += tariff.buy.values[i] * schedule.e_buy[i] -
                 tariff.sell.values[i] * schedule.e_sell[i];
    return total;
}

double day_objective(const Schedule& schedule, const TariffSchedule& tariff,
                     const BatterySpec& battery, const SolveOptions& opts) {
    double obj = bill(schedule, tariff);
    if (opts.use_l1) {
        double throughput_kw = 0.0;
        for (std::size_t i = 0; i < schedule.size(); ++i)
            throughput_kw += schedule.p_charge[i] + schedule.p_discharge[i];
        obj += battery.lambda_charging * throughput_kw;
    }
    if (opts.use_l2) obj += battery.lambda_capacity * (battery.soc_max - schedule.soc.back());
    return obj;
}

double dp_oracle(const TimeSeries& gen, const TimeSeries& demand, const TariffSchedule& tariff,
                 const BatterySpec& battery, std::size_t soc_grid_points,
                 bool enforce_cycle_cap) {
    battery.validate();
    check_power_pair(gen, demand);
    check_tariff_covers(tariff, gen);
    const std::size_t T = gen.size();
    if (T > 12) throw ConfigError("dp_oracle supports at most 12 steps");
    if (soc_grid_points < 2 || soc_grid_points > 201)
        throw ConfigError("dp_oracle grid must have 2..201 points");

    const double dt = gen.step_hours;
    const double range = battery.soc_max - battery.soc_min;
    const auto step_cost = [&](std::size_t i, double net_kw) {
        const double e = net_kw * dt; // kWh bought (+) or sold (-)
        return e > 0.0 ? tariff.buy.values[i] * e : tariff.sell.values[i] * e;
    };
    if (range <= 0.0) {
        double total = 0.0;
        for (std::size_t i = 0; i < T; ++i)
            total += step_cost(i, demand.values[i] - gen.values[i]);
        return total;
    }

    const std::size_t n = soc_grid_points;
    const double h = range / static_cast<double>(n - 1);
    const auto start = static_cast<std::size_t>(std::clamp(
        std::llround((battery.soc_initial - battery.soc_min) / h), 0LL,
        static_cast<long long>(n - 1)));
    const std::size_t max_units =
        enforce_cycle_cap
            ? std::min(static_cast<std::size_t>(battery.cycle_budget_kwh() / h + 1e-9),
                       T * (n - 1))
            : 0;
    const std::size_t layers = max_units + 1;
    if (n * layers > 2'000'000) throw ConfigError("dp_oracle instance too large");

    constexpr double kUnreachable = std::numeric_limits<double>::infinity();
    // cost[j * layers + u]: cheapest way to reach grid point j having spent
    // u budget units so far.
    std::vector<double> cost(n * layers, kUnreachable);
    cost[start * layers + 0] = 0.0;
    std::vector<double> next(n * layers);

    for (std::size_t i = 0; i < T; ++i) {
        std::fill(next.begin(), next.end(), kUnreachable);
        const double imbalance = demand.values[i] - gen.values[i];
        for (std::size_t from = 0; from < n; ++from) {
            for (std::size_t to = 0; to < n; ++to) {
                const double dsoc = (static_cast<double>(to) - static_cast<double>(from)) * h;
                double net_kw = imbalance;
                if (dsoc > 0.0) {
                    const double pc = dsoc / (battery.eta_c * dt);
                    if (pc > battery.p_max + 1e-9) continue;
                    net_kw += pc;
                } else if (dsoc < 0.0) {
                    const double pd = -dsoc * battery.eta_d / dt;
                    if (pd > battery.p_max + 1e-9) continue;
                    net_kw -= pd;
                }
                if (std::abs(net_kw) * dt > battery.e_max + 1e-9) continue;
                const double c = step_cost(i, net_kw);
                const std::size_t units =
                    enforce_cycle_cap ? (to > from ? to - from : from - to) : 0;
                for (std::size_t u = 0; u + units < layers; ++u) {
                    const double base = cost[from * layers + u];
                    if (base == kUnreachable) continue;
                    double& slot = next[to * layers + u + units];
                    if (base + c < slot) slot = base + c;
                }
            }
        }
        cost.swap(next);
    }
    const double best = *std::min_element(cost.begin(), cost.end());
    if (best == kUnreachable) throw InfeasibleError("dp_oracle: no feasible trajectory", "soc-recursion");
    return best;
}

void validate_community_schedule(const Schedule& s, const TimeSeries& gen,
                                 const TimeSeries& demand, const BatterySpec& battery,
                                 bool check_daily_cycle_cap) {
    constexpr double tol = 1e-6;
    check_power_pair(gen, demand);
    const std::size_t T = gen.size();
    const double dt = gen.step_hours;
    const auto fail = [](std::size_t i, const std::string& what) {
        throw ValidationError("schedule invariant violated at step " + std::to_string(i) + ": " +
                              what);
    };

    if (s.size() != T || s.soc.size() != T + 1 || s.p_discharge.size() != T ||
        s.e_buy.size() != T || s.e_sell.size() != T)
        throw ValidationError("schedule vectors do not match the series length");
    if (s.start_epoch_s != gen.start_epoch_s ||
        std::abs(s.step_hours - gen.step_hours) > 1e-12)
        throw ValidationError("schedule timeline does not match the series");
    if (std::abs(s.soc[0] - battery.soc_initial) > tol)
        fail(0, "initial SoC differs from battery.soc_initial");

    for (std::size_t i = 0; i < T; ++i) {
        if (s.soc[i + 1] < battery.soc_min - tol || s.soc[i + 1] > battery.soc_max + tol)
            fail(i, "SoC out of [soc_min, soc_max]");
        if (s.p_charge[i] < -tol || s.p_charge[i] > battery.p_max + tol)
            fail(i, "p_charge out of [0, p_max]");
        if (s.p_discharge[i] < -tol || s.p_discharge[i] > battery.p_max + tol)
            fail(i, "p_discharge out of [0, p_max]");
        if (s.e_buy[i] < -tol || s.e_buy[i] > battery.e_max + tol)
            fail(i, "e_buy out of [0, e_max]");
        if (s.e_sell[i] < -tol || s.e_sell[i] > battery.e_max + tol)
            fail(i, "e_sell out of [0, e_max]");
        const double rec = s.soc[i + 1] - s.soc[i] - battery.eta_c * dt * s.p_charge[i] +
                           dt / battery.eta_d * s.p_discharge[i];
        if (std::abs(rec) > tol) fail(i, "SoC recursion violated");
        const double bal = (s.p_charge[i] - s.p_discharge[i]) * dt -
                           (gen.values[i] - demand.values[i]) * dt - s.e_buy[i] + s.e_sell[i];
        if (std::abs(bal) > tol) fail(i, "power balance violated");
    }

    if (check_daily_cycle_cap && battery.soc_max > battery.soc_min) {
        const std::size_t day = steps_per_day(dt);
        const double budget = battery.cycle_budget_kwh();
        for (std::size_t t = 0; t < T; t += day) {
            double used = 0.0;
            for (std::size_t j = t; j < std::min(t + day, T); ++j)
                used += battery.eta_c * dt * s.p_charge[j] + dt / battery.eta_d * s.p_discharge[j];
            if (used > budget + tol * (1.0 + budget))
                fail(t, "daily cycle cap exceeded (" + std::to_string(used) + " kWh > " +
                            std::to_string(budget) + " kWh)");
        }
    }
}

void write_schedule_csv(const std::filesystem::path& path, const Schedule& s) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write '" + path.string() + "'");
    out << "step,timestamp,soc_kwh,p_charge_kw,p_discharge_kw,e_buy_kwh,e_sell_kwh\n";
    const auto step_s = static_cast<std::int64_t>(std::llround(s.step_hours * 3600.0));
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << i << ',' << format_iso8601_utc(s.start_epoch_s + static_cast<std::int64_t>(i) * step_s)
            << ',' << format_double(s.soc[i + 1]) << ',' << format_double(s.p_charge[i]) << ','
            << format_double(s.p_discharge[i]) << ',' << format_double(s.e_buy[i]) << ','
            << format_double(s.e_sell[i]) << '\n';
    }
    if (!out) throw LoadError("write failed for '" + path.string() + "'");
}

} // namespace bessim
