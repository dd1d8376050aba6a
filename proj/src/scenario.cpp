#include "bessim/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "bessim/csv.hpp"
#include "bessim/errors.hpp"
#include "bessim/market.hpp"
#include "bessim/pricing.hpp"
#include "bessim/scheduler.hpp"

namespace bessim {

namespace {

using nlohmann::json;

[[noreturn]] void bad_config(const std::string& what) { throw ConfigError("config: " + what); }

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) bad_config("'" + where + "' must be an object");
}

void reject_unknown_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) known = true;
        if (!known) bad_config("unknown key '" + where + key + "'");
    }
}

double get_number(const json& obj, const std::string& where, const char* key,
                  double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) bad_config("'" + where + key + "' must be a number");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& where, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) bad_config("'" + where + key + "' must be an integer");
    return v.get<int>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) bad_config("'" + where + key + "' must be a boolean");
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) bad_config("'" + where + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> get_number_array(const json& obj, const std::string& where,
                                     const char* key, std::vector<double> fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_array()) bad_config("'" + where + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number()) bad_config("'" + where + key + "' must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

DataSource parse_source(const json& data, const char* stream,
                        const std::filesystem::path& base_dir) {
    DataSource src;
    if (!data.contains(stream)) return src; // default: synthetic
    const json& j = data.at(stream);
    const std::string where = std::string("data.") + stream + ".";
    require_object(j, std::string("data.") + stream);
    reject_unknown_keys(j, where, {"file", "synth"});
    const bool has_file = j.contains("file");
    const bool wants_synth = get_bool(j, where, "synth", false);
    if (has_file == wants_synth)
        bad_config("stream '" + std::string(stream) +
                   "' needs exactly one of \"file\" or \"synth\": true");
    if (has_file) {
        src.synth = false;
        std::filesystem::path p = get_string(j, where, "file", "");
        src.path = p.is_absolute() ? p : base_dir / p;
    }
    return src;
}

SynthConfig parse_synth(const json& root) {
    SynthConfig s;
    if (!root.contains("synth")) return s;
    const json& j = root.at("synth");
    require_object(j, "synth");
    reject_unknown_keys(j, "synth.",
                        {"seed", "households", "days", "start", "demand_mean_kwh_per_halfhour",
                         "demand_peak_factor", "wind_weibull_k", "wind_weibull_scale_ms",
                         "wind_ar1_rho", "wind_gap_prob", "price_mean_eur_mwh",
                         "price_daily_amplitude", "price_noise_sd", "price_negative_prob"});
    if (j.contains("seed")) {
        const json& v = j.at("seed");
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                       v.get<std::int64_t>() < 0))
            bad_config("'synth.seed' must be a nonnegative integer");
        s.seed = v.get<std::uint64_t>();
    }
    s.households = get_int(j, "synth.", "households", s.households);
    s.days = get_int(j, "synth.", "days", s.days);
    if (j.contains("start")) s.start_epoch_s = parse_iso8601_utc(get_string(j, "synth.", "start", ""));
    s.demand_mean_kwh_per_halfhour =
        get_number(j, "synth.", "demand_mean_kwh_per_halfhour", s.demand_mean_kwh_per_halfhour);
    s.demand_peak_factor = get_number(j, "synth.", "demand_peak_factor", s.demand_peak_factor);
    s.wind_weibull_k = get_number(j, "synth.", "wind_weibull_k", s.wind_weibull_k);
    s.wind_weibull_scale_ms =
        get_number(j, "synth.", "wind_weibull_scale_ms", s.wind_weibull_scale_ms);
    s.wind_ar1_rho = get_number(j, "synth.", "wind_ar1_rho", s.wind_ar1_rho);
    s.wind_gap_prob = get_number(j, "synth.", "wind_gap_prob", s.wind_gap_prob);
    s.price_mean_eur_mwh = get_number(j, "synth.", "price_mean_eur_mwh", s.price_mean_eur_mwh);
    s.price_daily_amplitude =
        get_number(j, "synth.", "price_daily_amplitude", s.price_daily_amplitude);
    s.price_noise_sd = get_number(j, "synth.", "price_noise_sd", s.price_noise_sd);
    s.price_negative_prob =
        get_number(j, "synth.", "price_negative_prob", s.price_negative_prob);
    return s;
}

BatterySpec parse_battery(const json& root) {
    BatterySpec b = BatterySpec::community(10.0);
    if (!root.contains("battery")) return b;
    const json& j = root.at("battery");
    require_object(j, "battery");
    reject_unknown_keys(j, "battery.",
                        {"capacity_kwh", "p_max_kw", "e_max_kwh", "soc_min_kwh",
                         "soc_initial_kwh", "eta_c", "eta_d", "eta_cd", "lambda_charging",
                         "lambda_capacity", "lambda_max_cycles", "soc_eod_min_frac"});
    b = BatterySpec::community(get_number(j, "battery.", "capacity_kwh", 10.0));
    b.p_max = get_number(j, "battery.", "p_max_kw", b.p_max);
    b.e_max = get_number(j, "battery.", "e_max_kwh", b.e_max);
    b.soc_min = get_number(j, "battery.", "soc_min_kwh", b.soc_min);
    b.soc_initial = get_number(j, "battery.", "soc_initial_kwh", b.soc_initial);
    b.eta_c = get_number(j, "battery.", "eta_c", b.eta_c);
    b.eta_d = get_number(j, "battery.", "eta_d", b.eta_d);
    b.eta_cd = get_number(j, "battery.", "eta_cd", b.eta_cd);
    b.lambda_charging = get_number(j, "battery.", "lambda_charging", b.lambda_charging);
    b.lambda_capacity = get_number(j, "battery.", "lambda_capacity", b.lambda_capacity);
    b.lambda_max_cycles = get_number(j, "battery.", "lambda_max_cycles", b.lambda_max_cycles);
    b.soc_eod_min_frac = get_number(j, "battery.", "soc_eod_min_frac", b.soc_eod_min_frac);
    return b;
}

TariffConfig parse_tariff(const json& root) {
    TariffConfig t;
    if (!root.contains("tariff")) return t;
    const json& j = root.at("tariff");
    require_object(j, "tariff");
    reject_unknown_keys(j, "tariff.",
                        {"kind", "buy", "sell", "export_paid", "adder", "sell_frac",
                         "sell_cap"});
    const std::string kind = get_string(j, "tariff.", "kind", "flat");
    if (kind == "flat")
        t.kind = TariffKind::Flat;
    else if (kind == "dynamic")
        t.kind = TariffKind::Dynamic;
    else
        bad_config("'tariff.kind' must be \"flat\" or \"dynamic\"");
    t.flat_buy_eur_kwh = get_number(j, "tariff.", "buy", t.flat_buy_eur_kwh);
    t.flat_sell_eur_kwh = get_number(j, "tariff.", "sell", t.flat_sell_eur_kwh);
    t.export_paid = get_bool(j, "tariff.", "export_paid", t.export_paid);
    t.adder_eur_kwh = get_number(j, "tariff.", "adder", t.adder_eur_kwh);
    t.sell_frac = get_number(j, "tariff.", "sell_frac", t.sell_frac);
    t.sell_cap_eur_kwh = get_number(j, "tariff.", "sell_cap", t.sell_cap_eur_kwh);
    return t;
}

TurbineModel parse_turbine(const json& root) {
    TurbineModel m;
    if (!root.contains("turbine")) return m;
    const json& j = root.at("turbine");
    require_object(j, "turbine");
    reject_unknown_keys(j, "turbine.",
                        {"capacity_kw", "sigmoid_a", "sigmoid_b", "hub_height_m",
                         "anemometer_height_m", "roughness_m", "price_per_kw",
                         "amortization_years"});
    m.capacity_kw = get_number(j, "turbine.", "capacity_kw", m.capacity_kw);
    m.sigmoid_a = get_number(j, "turbine.", "sigmoid_a", m.sigmoid_a);
    m.sigmoid_b = get_number(j, "turbine.", "sigmoid_b", m.sigmoid_b);
    m.hub_height_m = get_number(j, "turbine.", "hub_height_m", m.hub_height_m);
    m.anemometer_height_m =
        get_number(j, "turbine.", "anemometer_height_m", m.anemometer_height_m);
    m.roughness_m = get_number(j, "turbine.", "roughness_m", m.roughness_m);
    m.price_per_kw = get_number(j, "turbine.", "price_per_kw", m.price_per_kw);
    m.amortization_years = get_number(j, "turbine.", "amortization_years", m.amortization_years);
    return m;
}

ControllerMode parse_mode(const std::string& mode) {
    if (mode == "greedy") return ControllerMode::Greedy;
    if (mode == "lp") return ControllerMode::Lp;
    if (mode == "milp") return ControllerMode::Milp;
    if (mode == "rolling") return ControllerMode::Rolling;
    bad_config("controller mode '" + mode + "' is not one of greedy/lp/milp/rolling");
}

std::vector<ControllerConfig> parse_controllers(const json& root) {
    std::vector<ControllerConfig> out;
    if (!root.contains("controllers")) {
        ControllerConfig greedy{"greedy", SolveOptions{}};
        greedy.opts.mode = ControllerMode::Greedy;
        ControllerConfig lp{"lp", SolveOptions{}};
        lp.opts.use_l1 = lp.opts.use_l2 = true;
        return {greedy, lp};
    }
    const json& arr = root.at("controllers");
    if (!arr.is_array()) bad_config("'controllers' must be an array");
    for (const json& j : arr) {
        require_object(j, "controllers[]");
        reject_unknown_keys(j, "controllers[].",
                            {"name", "mode", "use_l1", "use_l2", "eod_min_frac",
                             "rolling_period_steps", "horizon_steps"});
        ControllerConfig c;
        const std::string mode = get_string(j, "controllers[].", "mode", "lp");
        c.opts.mode = parse_mode(mode);
        c.name = get_string(j, "controllers[].", "name", mode);
        c.opts.use_l1 = get_bool(j, "controllers[].", "use_l1", false);
        c.opts.use_l2 = get_bool(j, "controllers[].", "use_l2", false);
        c.opts.eod_min_frac = get_number(j, "controllers[].", "eod_min_frac", 0.0);
        c.opts.rolling_period_steps =
            get_int(j, "controllers[].", "rolling_period_steps", c.opts.rolling_period_steps);
        c.opts.horizon_steps = get_int(j, "controllers[].", "horizon_steps", c.opts.horizon_steps);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<double> default_capacity_grid() {
    std::vector<double> grid;
    for (int c = 0; c <= 1000; c += 20) grid.push_back(c);
    return grid;
}

std::vector<double> default_r_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 8; ++i) grid.push_back(0.25 * i);
    return grid;
}

double round_cents(double eur) { return std::round(eur * 100.0) / 100.0; }

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw LoadError("write failed for '" + path.string() + "'");
}

/// Sorted, de-duplicated sweep grid; presence of the zero baseline and
/// the fleet bound were checked at config validation.
std::vector<double> sweep_grid(const ScenarioConfig& cfg) {
    std::vector<double> grid = cfg.capacities;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

PricingInputs pricing_inputs(const ScenarioConfig& cfg, const ScenarioData& data) {
    PricingInputs in;
    in.gen_kw = data.gen_kw;
    in.demand_kw = data.demand_kw;
    in.tariff = data.tariff;
    in.tariff_label = cfg.tariff.kind == TariffKind::Flat ? "flat" : "dynamic";
    in.day_ahead_eur_kwh = data.day_ahead_eur_kwh;
    in.full_market_capacity_kwh = cfg.market.full_capacity_kwh;
    in.turbine_cost_eur_per_year =
        cfg.turbine.capacity_kw * cfg.turbine.price_per_kw / cfg.turbine.amortization_years;
    in.market_eod_min_frac = cfg.market.eod_min_frac;
    return in;
}

/// Community bills over the sweep grid, one chained year per capacity.
std::vector<double> sweep_bills(const PricingInputs& in, const std::vector<double>& grid,
                                int jobs) {
    std::vector<double> bills(grid.size());
    parallel_for(grid.size(), jobs,
                 [&](std::size_t i) { bills[i] = community_year_bill(in, grid[i]); });
    return bills;
}

/// Operator profits when parting with each grid capacity, plus the
/// derived minimum rental prices.
PriceCurve sweep_min_curve(const PricingInputs& in, const std::vector<double>& grid,
                           int jobs) {
    std::vector<double> profits(grid.size());
    parallel_for(grid.size(), jobs, [&](std::size_t i) {
        profits[i] = market_year_profit(in.day_ahead_eur_kwh,
                                        in.full_market_capacity_kwh - grid[i],
                                        in.market_eod_min_frac)
                         .profit_eur;
    });
    PriceCurve curve;
    for (std::size_t i = 0; i < grid.size(); ++i)
        curve.points.emplace_back(grid[i], profits[0] - profits[i]);
    curve.validate();
    return curve;
}

PriceCurve max_curve_from_bills(const PricingInputs& in, const std::vector<double>& grid,
                                const std::vector<double>& bills) {
    PriceCurve curve;
    for (std::size_t i = 0; i < grid.size(); ++i)
        curve.points.emplace_back(grid[i], bills[0] - bills[i]);
    curve.validate();
    return curve;
}

json degradation_report(const Schedule& s, const BatterySpec& battery, const LifeCurve& life) {
    json out;
    DegradationSummary summary;
    if (battery.soc_max > 0.0) {
        TimeSeries soc;
        soc.start_epoch_s = s.start_epoch_s;
        soc.step_hours = s.step_hours;
        soc.unit = Unit::KilowattHour;
        soc.values = s.soc;
        summary = summarize_degradation(rainflow_extract(soc, battery.soc_max), life);
    }
    out["degradation_factor"] = summary.df;
    out["cycles"] = {{"regular_full", summary.regular_full},
                     {"regular_half", summary.regular_half},
                     {"irregular_full", summary.irregular_full},
                     {"irregular_half", summary.irregular_half}};
    return out;
}

} // namespace

void ScenarioConfig::validate() const {
    if (config_version != 1)
        throw ConfigError("config: unsupported config_version " +
                          std::to_string(config_version));
    for (const auto* src : {&demand, &wind, &prices})
        if (!src->synth && !std::filesystem::exists(src->path))
            throw MissingInputError("input file '" + src->path.string() + "' does not exist");
    if (!life_curve_file.empty() && !std::filesystem::exists(life_curve_file))
        throw MissingInputError("input file '" + life_curve_file.string() +
                                "' does not exist");
    synth.validate();
    battery.validate();
    turbine.validate();
    if (!(tariff.flat_buy_eur_kwh >= tariff.flat_sell_eur_kwh) ||
        !(tariff.flat_sell_eur_kwh >= 0.0))
        throw ConfigError("config: flat tariff requires buy >= sell >= 0");
    if (!(tariff.adder_eur_kwh >= 0.0) || !(tariff.sell_cap_eur_kwh >= 0.0) ||
        !(tariff.sell_frac >= 0.0 && tariff.sell_frac <= 1.0))
        throw ConfigError("config: dynamic tariff parameters out of range");
    if (controllers.empty()) throw ConfigError("config: at least one controller is required");
    for (const auto& c : controllers) {
        if (c.name.empty()) throw ConfigError("config: controller names must be non-empty");
        for (char ch : c.name)
            if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_')
                throw ConfigError("config: controller name '" + c.name +
                                  "' may only use letters, digits, '-' and '_'");
        for (const auto& other : controllers)
            if (&other != &c && other.name == c.name)
                throw ConfigError("config: duplicate controller name '" + c.name + "'");
    }
    if (!(market.full_capacity_kwh >= 0.0))
        throw ConfigError("config: market.full_capacity_kwh must be nonnegative");
    if (!(market.eod_min_frac >= 0.0 && market.eod_min_frac <= 1.0))
        throw ConfigError("config: market.eod_min_frac must lie in [0, 1]");
    if (capacities.empty()) throw ConfigError("config: sweep.capacities must be non-empty");
    bool has_zero = false;
    for (double c : capacities) {
        if (!(c >= 0.0) || !std::isfinite(c))
            throw ConfigError("config: sweep capacities must be nonnegative and finite");
        if (c == 0.0) has_zero = true;
        if (c > market.full_capacity_kwh)
            throw ConfigError("config: sweep capacity exceeds market.full_capacity_kwh");
    }
    if (!has_zero)
        throw ConfigError("config: sweep.capacities must include the 0 kWh baseline");
    for (double r : r_values)
        if (!(r >= 0.0) || !std::isfinite(r))
            throw ConfigError("config: sweep r_values must be nonnegative and finite");
}

ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        bad_config(e.what());
    }
    require_object(root, "scenario");
    reject_unknown_keys(root, "",
                        {"config_version", "data", "synth", "battery", "tariff", "turbine",
                         "controllers", "market", "sweep", "output_dir", "life_curve_file"});
    if (!root.contains("config_version"))
        bad_config("missing required key 'config_version'");

    ScenarioConfig cfg;
    cfg.config_version = get_int(root, "", "config_version", 0);
    if (root.contains("data")) {
        const json& data = root.at("data");
        require_object(data, "data");
        reject_unknown_keys(data, "data.", {"demand", "wind", "prices"});
        cfg.demand = parse_source(data, "demand", base_dir);
        cfg.wind = parse_source(data, "wind", base_dir);
        cfg.prices = parse_source(data, "prices", base_dir);
    }
    cfg.synth = parse_synth(root);
    cfg.battery = parse_battery(root);
    cfg.tariff = parse_tariff(root);
    cfg.turbine = parse_turbine(root);
    cfg.controllers = parse_controllers(root);
    if (root.contains("market")) {
        const json& j = root.at("market");
        require_object(j, "market");
        reject_unknown_keys(j, "market.", {"full_capacity_kwh", "eod_min_frac"});
        cfg.market.full_capacity_kwh =
            get_number(j, "market.", "full_capacity_kwh", cfg.market.full_capacity_kwh);
        cfg.market.eod_min_frac =
            get_number(j, "market.", "eod_min_frac", cfg.market.eod_min_frac);
    }
    cfg.capacities = default_capacity_grid();
    cfg.r_values = default_r_grid();
    if (root.contains("sweep")) {
        const json& j = root.at("sweep");
        require_object(j, "sweep");
        reject_unknown_keys(j, "sweep.", {"capacities", "r_values"});
        cfg.capacities = get_number_array(j, "sweep.", "capacities", cfg.capacities);
        cfg.r_values = get_number_array(j, "sweep.", "r_values", cfg.r_values);
    }
    {
        std::filesystem::path out = get_string(root, "", "output_dir", "out");
        cfg.output_dir = out.is_absolute() ? out : base_dir / out;
        const std::string life = get_string(root, "", "life_curve_file", "");
        if (!life.empty()) {
            std::filesystem::path p = life;
            cfg.life_curve_file = p.is_absolute() ? p : base_dir / p;
        }
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& config_path) {
    std::ifstream in(config_path);
    if (!in) throw MissingInputError("input file '" + config_path.string() + "' does not exist");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), config_path.parent_path());
}

ScenarioData assemble_inputs(const ScenarioConfig& cfg) {
    cfg.validate();
    ScenarioData data;

    HouseholdDemandSet homes =
        cfg.demand.synth ? gen_demand(cfg.synth) : load_demand_csv(cfg.demand.path);
    bool needs_fill = false;
    for (const auto& [id, ts] : homes.households)
        if (!ts.gap_free() || ts.step_hours != 0.5) needs_fill = true;
    if (needs_fill) // all or none, so the set stays aligned
        for (auto& [id, ts] : homes.households) ts = fill_and_resample(ts);
    data.demand_kw = energy_to_power(aggregate_households(homes));

    TimeSeries wind = cfg.wind.synth ? gen_wind(cfg.synth) : load_wind_csv(cfg.wind.path);
    TimeSeries gen = generation_series(fill_and_resample(wind), cfg.turbine);
    if (gen.start_epoch_s != data.demand_kw.start_epoch_s)
        throw ConfigError("wind and demand streams start at different timestamps");
    data.gen_kw = conform_length(gen, data.demand_kw.size());

    TimeSeries prices;
    if (cfg.prices.synth) {
        prices = scaled(gen_prices(cfg.synth), 1e-3); // EUR/MWh -> EUR/kWh
        prices.unit = Unit::EurPerKilowattHour;
    } else {
        prices = load_day_ahead_csv(cfg.prices.path);
    }
    if (!prices.gap_free())
        throw ConfigError("day-ahead prices contain gaps; provide a complete series");
    TimeSeries half = replicate_to_halfhour(prices);
    if (half.start_epoch_s != data.demand_kw.start_epoch_s)
        throw ConfigError("day-ahead prices and demand start at different timestamps");
    data.day_ahead_eur_kwh = conform_length(half, data.demand_kw.size());

    if (cfg.tariff.kind == TariffKind::Flat)
        data.tariff = flat_tariff(cfg.tariff.flat_buy_eur_kwh, cfg.tariff.flat_sell_eur_kwh,
                                  data.demand_kw.size(), data.demand_kw.start_epoch_s);
    else
        data.tariff = dynamic_tariff(data.day_ahead_eur_kwh, cfg.tariff.export_paid,
                                     cfg.tariff.adder_eur_kwh, cfg.tariff.sell_frac,
                                     cfg.tariff.sell_cap_eur_kwh);

    data.life = cfg.life_curve_file.empty() ? synthetic_life_curve()
                                            : load_life_curve_csv(cfg.life_curve_file);
    return data;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<std::filesystem::path> run_simulate_community(const ScenarioConfig& cfg,
                                                          int jobs) {
    const ScenarioData data = assemble_inputs(cfg);
    std::filesystem::create_directories(cfg.output_dir);

    std::vector<Schedule> schedules(cfg.controllers.size());
    parallel_for(cfg.controllers.size(), jobs, [&](std::size_t i) {
        schedules[i] = chain_year(data.gen_kw, data.demand_kw, data.tariff, cfg.battery,
                                  cfg.controllers[i].opts);
    });

    json summary;
    summary["battery"] = {{"capacity_kwh", cfg.battery.soc_max},
                          {"p_max_kw", cfg.battery.p_max}};
    summary["tariff"] = cfg.tariff.kind == TariffKind::Flat ? "flat" : "dynamic";
    summary["steps"] = schedules.empty() ? 0 : schedules.front().size();
    summary["step_hours"] = data.demand_kw.step_hours;
    summary["turbine_cost_eur_per_year"] = round_cents(
        cfg.turbine.capacity_kw * cfg.turbine.price_per_kw / cfg.turbine.amortization_years);

    std::vector<std::filesystem::path> written;
    json controllers;
    for (std::size_t i = 0; i < cfg.controllers.size(); ++i) {
        const auto& c = cfg.controllers[i];
        json entry = degradation_report(schedules[i], cfg.battery, data.life);
        entry["yearly_bill_eur"] = round_cents(schedules[i].objective_value);
        controllers[c.name] = std::move(entry);
        const auto path = cfg.output_dir / ("schedule_" + c.name + ".csv");
        write_schedule_csv(path, schedules[i]);
        written.push_back(path);
    }
    summary["controllers"] = std::move(controllers);

    const auto summary_path = cfg.output_dir / "summary.json";
    write_json_file(summary_path, summary);
    written.push_back(summary_path);
    return written;
}

std::vector<std::filesystem::path> run_simulate_market(const ScenarioConfig& cfg) {
    const ScenarioData data = assemble_inputs(cfg);
    std::filesystem::create_directories(cfg.output_dir);

    const MarketResult result = market_year_profit(
        data.day_ahead_eur_kwh, cfg.market.full_capacity_kwh, cfg.market.eod_min_frac);

    const auto schedule_path = cfg.output_dir / "market_schedule.csv";
    write_schedule_csv(schedule_path, result.schedule);

    json summary;
    summary["capacity_kwh"] = result.capacity_kwh;
    summary["eod_min_frac"] = cfg.market.eod_min_frac;
    summary["profit_eur"] = round_cents(result.profit_eur);
    summary["steps"] = result.schedule.size();
    const auto summary_path = cfg.output_dir / "market_summary.json";
    write_json_file(summary_path, summary);
    return {schedule_path, summary_path};
}

std::vector<std::filesystem::path> run_price_range(const ScenarioConfig& cfg, int jobs) {
    const ScenarioData data = assemble_inputs(cfg);
    const PricingInputs in = pricing_inputs(cfg, data);
    const std::vector<double> grid = sweep_grid(cfg);

    const std::vector<double> bills = sweep_bills(in, grid, jobs);
    const PriceCurve max_curve = max_curve_from_bills(in, grid, bills);
    const PriceCurve min_curve = sweep_min_curve(in, grid, jobs);
    const auto region = feasible_region(max_curve, min_curve);

    std::filesystem::create_directories(cfg.output_dir);
    const auto csv_path = cfg.output_dir / "price_range.csv";
    write_price_range_csv(csv_path, min_curve, max_curve);

    json report;
    report["empty"] = region.empty();
    report["points"] = json::array();
    for (const auto& p : region)
        report["points"].push_back({{"capacity_kwh", p.capacity_kwh},
                                    {"price_low_eur", round_cents(p.price_low_eur)},
                                    {"price_high_eur", round_cents(p.price_high_eur)}});
    const auto json_path = cfg.output_dir / "feasible_region.json";
    write_json_file(json_path, report);
    return {csv_path, json_path};
}

std::vector<std::filesystem::path> run_size(const ScenarioConfig& cfg, int jobs) {
    const ScenarioData data = assemble_inputs(cfg);
    const PricingInputs in = pricing_inputs(cfg, data);
    const std::vector<double> grid = sweep_grid(cfg);
    const PriceCurve min_curve = sweep_min_curve(in, grid, jobs);

    auto table_for = [&](const PricingInputs& inputs) {
        const std::vector<double> bills = sweep_bills(inputs, grid, jobs);
        std::vector<SizingRow> rows(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            rows[i].capacity_kwh = grid[i];
            rows[i].total_cost_eur = bills[i] + inputs.turbine_cost_eur_per_year +
                                     min_curve.points[i].second;
        }
        for (auto& row : rows) row.savings_eur = rows.front().total_cost_eur - row.total_cost_eur;
        return rows;
    };
    auto best_of = [&](const std::vector<SizingRow>& rows, const PricingInputs& inputs) {
        const SizingRow* best = &rows.front();
        for (const auto& row : rows)
            if (row.total_cost_eur < best->total_cost_eur) best = &row;
        ScenarioResult r;
        r.annual_cost_eur = best->total_cost_eur;
        r.annual_savings_eur = best->savings_eur;
        r.optimal_capacity_kwh = best->capacity_kwh;
        r.tariff_label = inputs.tariff_label;
        r.r_gen = generation_coefficient(inputs.gen_kw, inputs.demand_kw);
        return r;
    };

    const std::vector<SizingRow> rows = table_for(in);
    const ScenarioResult best = best_of(rows, in);

    std::vector<std::pair<double, ScenarioResult>> cosizing;
    for (double r : cfg.r_values) {
        const ScaledGeneration scaled_gen =
            scale_to_coefficient(in.gen_kw, in.demand_kw, r, cfg.turbine);
        PricingInputs ri = in;
        ri.gen_kw = scaled_gen.gen;
        ri.turbine_cost_eur_per_year = scaled_gen.annual_cost_eur;
        cosizing.emplace_back(r, best_of(table_for(ri), ri));
    }

    std::filesystem::create_directories(cfg.output_dir);
    const auto sizing_path = cfg.output_dir / "sizing.csv";
    write_sizing_csv(sizing_path, rows);
    std::vector<std::filesystem::path> written{sizing_path};
    if (!cosizing.empty()) {
        const auto cosizing_path = cfg.output_dir / "cosizing.csv";
        write_cosizing_csv(cosizing_path, cosizing);
        written.push_back(cosizing_path);
    }

    json result;
    result["annual_cost_eur"] = round_cents(best.annual_cost_eur);
    result["annual_savings_eur"] = round_cents(best.annual_savings_eur);
    result["optimal_capacity_kwh"] = best.optimal_capacity_kwh;
    result["r_gen"] = best.r_gen;
    result["tariff"] = best.tariff_label;
    const auto result_path = cfg.output_dir / "scenario_result.json";
    write_json_file(result_path, result);
    written.push_back(result_path);
    return written;
}

std::vector<std::filesystem::path> run_gen_data(const ScenarioConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.output_dir);
    const auto demand_path = cfg.output_dir / "demand.csv";
    write_demand_csv(demand_path, gen_demand(cfg.synth));
    const auto wind_path = cfg.output_dir / "wind.csv";
    write_wind_csv(wind_path, gen_wind(cfg.synth));
    const auto prices_path = cfg.output_dir / "prices.csv";
    write_day_ahead_csv(prices_path, gen_prices(cfg.synth));
    return {demand_path, wind_path, prices_path};
}

} // namespace bessim
