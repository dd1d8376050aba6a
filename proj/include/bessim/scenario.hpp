#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "bessim/battery.hpp"
#include "bessim/degradation.hpp"
#include "bessim/synthdata.hpp"
#include "bessim/tariffs.hpp"
#include "bessim/timeseries.hpp"
#include "bessim/wind.hpp"

namespace bessim {

/// Where one input stream comes from: a CSV on disk or the seeded
/// synthetic generator. Exactly one per stream.
struct DataSource {
    bool synth = true;
    std::filesystem::path path; // meaningful only when !synth
};

struct TariffConfig {
    TariffKind kind = TariffKind::Flat;
    double flat_buy_eur_kwh = 0.40;
    double flat_sell_eur_kwh = 0.10;
    bool export_paid = true; // dynamic tariffs only
    double adder_eur_kwh = 0.155;
    double sell_frac = 0.9;
    double sell_cap_eur_kwh = 0.10;
};

/// One controller to run in simulate-community; `name` keys the summary
/// entry and the schedule artifact.
struct ControllerConfig {
    std::string name;
    SolveOptions opts;
};

struct MarketConfig {
    double full_capacity_kwh = 1000.0; // covers the default sweep grid
    double eod_min_frac = 0.0;
};

/// Parsed scenario file (JSON, versioned via `config_version`). Paths are
/// resolved against the config file's directory at load time.
struct ScenarioConfig {
    int config_version = 1;
    DataSource demand, wind, prices;
    SynthConfig synth;
    BatterySpec battery = BatterySpec::community(10.0);
    TariffConfig tariff;
    TurbineModel turbine;
    std::vector<ControllerConfig> controllers;
    MarketConfig market;
    std::vector<double> capacities; // rental sweep grid, must include 0
    std::vector<double> r_values;   // cosizing sweep
    std::filesystem::path output_dir = "out";
    std::filesystem::path life_curve_file; // empty: built-in synthetic curve

    void validate() const; // throws ConfigError / MissingInputError
};

/// Parse a scenario from JSON text; relative paths resolve against
/// `base_dir`. Unknown keys are rejected so typos cannot silently fall
/// back to defaults.
ScenarioConfig parse_scenario(const std::string& json_text,
                              const std::filesystem::path& base_dir);
ScenarioConfig load_scenario(const std::filesystem::path& config_path);

/// Fully assembled model inputs on the common half-hourly grid.
struct ScenarioData {
    TimeSeries gen_kw;
    TimeSeries demand_kw;
    TimeSeries day_ahead_eur_kwh; // half-hourly, for trading + dynamic tariffs
    TariffSchedule tariff;
    LifeCurve life;
};

/// Load or generate the three streams, gap-fill and resample them onto
/// the demand grid, convert wind speeds to turbine power, and build the
/// tariff. Throws on misaligned or gap-ridden price data.
ScenarioData assemble_inputs(const ScenarioConfig& cfg);

/// Run fn(0..n-1) on up to `jobs` worker threads. Each index is computed
/// independently and exactly once, so results are identical for every
/// jobs value; only wall time changes.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// Command backends. Each writes its artifacts under cfg.output_dir
// (created if needed) and returns the paths written, deterministically
// ordered. Monetary values inside summary JSONs are rounded to cents;
// CSVs carry full precision.
std::vector<std::filesystem::path> run_simulate_community(const ScenarioConfig& cfg, int jobs);
std::vector<std::filesystem::path> run_simulate_market(const ScenarioConfig& cfg);
std::vector<std::filesystem::path> run_price_range(const ScenarioConfig& cfg, int jobs);
std::vector<std::filesystem::path> run_size(const ScenarioConfig& cfg, int jobs);
std::vector<std::filesystem::path> run_gen_data(const ScenarioConfig& cfg);

} // namespace bessim
