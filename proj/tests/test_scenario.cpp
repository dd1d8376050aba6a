#include "doctest.h"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "json.hpp"

#include "bessim/errors.hpp"
#include "bessim/pricing.hpp"
#include "bessim/scenario.hpp"

using namespace bessim;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Small, fast scenario: 2 synthetic days, 3 households, 5 kWh battery.
std::string small_scenario_json() {
    return R"({
      "config_version": 1,
      "synth": {"seed": 42, "households": 3, "days": 2},
      "battery": {"capacity_kwh": 5.0},
      "tariff": {"kind": "flat", "buy": 0.40, "sell": 0.10},
      "market": {"full_capacity_kwh": 10.0, "eod_min_frac": 0.5},
      "sweep": {"capacities": [0, 5, 10], "r_values": [0.5, 1.0]}
    })";
}

} // namespace

TEST_CASE("a minimal config parses with documented defaults") {
    auto cfg = parse_scenario(R"({"config_version": 1})", ".");
    CHECK(cfg.demand.synth);
    CHECK(cfg.wind.synth);
    CHECK(cfg.prices.synth);
    CHECK(cfg.battery.soc_max == 10.0);
    CHECK(cfg.battery.p_max == 5.0);
    CHECK(cfg.tariff.kind == TariffKind::Flat);
    REQUIRE(cfg.controllers.size() == 2);
    CHECK(cfg.controllers[0].name == "greedy");
    CHECK(cfg.controllers[0].opts.mode == ControllerMode::Greedy);
    CHECK(cfg.controllers[1].name == "lp");
    CHECK(cfg.controllers[1].opts.use_l1);
    CHECK(cfg.controllers[1].opts.use_l2);
    CHECK(cfg.capacities.size() == 51); // 0..1000 step 20
    CHECK(cfg.capacities.front() == 0.0);
    CHECK(cfg.capacities.back() == 1000.0);
    CHECK(cfg.r_values.size() == 9); // 0..2 step 0.25
}

TEST_CASE("config rejections: versioning, typos, types, and ranges") {
    CHECK_THROWS_AS(parse_scenario(R"({})", "."), ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"config_version": 2})", "."), ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"config_version": 1, "batery": {}})", "."),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_scenario(R"({"config_version": 1, "battery": {"capacity_kwh": "big"}})", "."),
        ConfigError);
    CHECK_THROWS_AS(
        parse_scenario(R"({"config_version": 1, "tariff": {"kind": "spot"}})", "."),
        ConfigError);
    CHECK_THROWS_AS(parse_scenario("not json at all", "."), ConfigError);
    // data streams need exactly one source
    CHECK_THROWS_AS(
        parse_scenario(
            R"({"config_version": 1, "data": {"wind": {"file": "w.csv", "synth": true}}})",
            "."),
        ConfigError);
    CHECK_THROWS_AS(
        parse_scenario(R"({"config_version": 1, "data": {"wind": {"synth": false}}})", "."),
        ConfigError);
    // duplicate controller names
    CHECK_THROWS_AS(
        parse_scenario(
            R"({"config_version": 1,
                "controllers": [{"mode": "lp"}, {"mode": "lp"}]})",
            "."),
        ConfigError);
    // sweep must keep the baseline and stay inside the fleet
    CHECK_THROWS_AS(
        parse_scenario(R"({"config_version": 1, "sweep": {"capacities": [20, 40]}})", "."),
        ConfigError);
    CHECK_THROWS_AS(
        parse_scenario(
            R"({"config_version": 1, "market": {"full_capacity_kwh": 30},
                "sweep": {"capacities": [0, 40]}})",
            "."),
        ConfigError);
}

TEST_CASE("referenced files must exist at validation time") {
    try {
        parse_scenario(
            R"({"config_version": 1, "data": {"demand": {"file": "no_such_demand.csv"}}})",
            "/tmp");
        FAIL("expected MissingInputError");
    } catch (const MissingInputError& e) {
        CHECK(std::string(e.what()).find("no_such_demand.csv") != std::string::npos);
    }
}

TEST_CASE("assemble_inputs produces one aligned half-hourly bundle") {
    auto cfg = parse_scenario(small_scenario_json(), ".");
    auto data = assemble_inputs(cfg);
    REQUIRE(data.demand_kw.size() == 96);
    CHECK(data.demand_kw.unit == Unit::Kilowatt);
    CHECK(data.demand_kw.step_hours == 0.5);
    CHECK(data.gen_kw.size() == 96);
    CHECK(data.gen_kw.start_epoch_s == data.demand_kw.start_epoch_s);
    CHECK(data.day_ahead_eur_kwh.size() == 96);
    CHECK(data.day_ahead_eur_kwh.unit == Unit::EurPerKilowattHour);
    CHECK(data.tariff.buy.size() == 96);
    CHECK(data.tariff.buy.values[0] == 0.40);
    CHECK(data.tariff.kind == TariffKind::Flat);
    data.life.validate();
    for (double v : data.gen_kw.values) {
        CHECK(v >= 0.0);
        CHECK(v <= cfg.turbine.capacity_kw);
    }
    // day-ahead prices are the hourly synthetic curve replicated in pairs
    for (std::size_t i = 0; i + 1 < 96; i += 2)
        CHECK(data.day_ahead_eur_kwh.values[i] == data.day_ahead_eur_kwh.values[i + 1]);
}

TEST_CASE("dynamic tariffs are derived from the day-ahead curve") {
    auto text = std::string(R"({
      "config_version": 1,
      "synth": {"seed": 7, "households": 2, "days": 1},
      "tariff": {"kind": "dynamic", "export_paid": true, "adder": 0.155}
    })");
    auto data = assemble_inputs(parse_scenario(text, "."));
    CHECK(data.tariff.kind == TariffKind::Dynamic);
    REQUIRE(data.tariff.day_ahead.has_value());
    for (std::size_t i = 0; i < data.tariff.buy.size(); ++i) {
        const double expected = std::max(0.0, data.day_ahead_eur_kwh.values[i] + 0.155);
        CHECK(data.tariff.buy.values[i] == doctest::Approx(expected).epsilon(1e-12));
        CHECK(data.tariff.sell.values[i] <= 0.10 + 1e-12);
    }
}

TEST_CASE("synthetic wind gaps are spline-filled during assembly") {
    auto text = std::string(R"({
      "config_version": 1,
      "synth": {"seed": 9, "households": 2, "days": 2, "wind_gap_prob": 0.2}
    })");
    auto data = assemble_inputs(parse_scenario(text, "."));
    CHECK(data.gen_kw.size() == 96);
    CHECK(data.gen_kw.gap_free());
    for (double v : data.gen_kw.values) CHECK(v >= 0.0);
}

TEST_CASE("parallel_for covers every index once for any worker count") {
    std::vector<int> hits(257, 0);
    std::atomic<int> calls{0};
    parallel_for(hits.size(), 4, [&](std::size_t i) {
        hits[i] += 1;
        calls.fetch_add(1);
    });
    CHECK(calls.load() == 257);
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));

    std::vector<double> seq(64), par(64);
    parallel_for(seq.size(), 1, [&](std::size_t i) { seq[i] = static_cast<double>(i * i); });
    parallel_for(par.size(), 7, [&](std::size_t i) { par[i] = static_cast<double>(i * i); });
    CHECK(seq == par);

    CHECK_THROWS_AS(parallel_for(4, 0, [](std::size_t) {}), ConfigError);
    CHECK_THROWS_AS(parallel_for(8, 3,
                                 [](std::size_t i) {
                                     if (i == 5) throw ValidationError("boom");
                                 }),
                    ValidationError);
}

TEST_CASE("simulate-community writes schedules plus a summary") {
    auto dir = fresh_dir("bessim_scn_community");
    auto cfg = parse_scenario(small_scenario_json(), ".");
    cfg.output_dir = dir;
    auto paths = run_simulate_community(cfg, 1);
    REQUIRE(paths.size() == 3); // greedy + lp schedules, summary
    for (const auto& p : paths) CHECK(std::filesystem::exists(p));

    auto summary = nlohmann::json::parse(read_file(dir / "summary.json"));
    CHECK(summary.at("tariff") == "flat");
    CHECK(summary.at("steps") == 96);
    CHECK(summary.at("battery").at("capacity_kwh") == 5.0);
    for (const char* name : {"greedy", "lp"}) {
        const auto& entry = summary.at("controllers").at(name);
        CHECK(entry.at("yearly_bill_eur").is_number());
        CHECK(entry.at("degradation_factor").get<double>() >= 0.0);
        CHECK(entry.at("cycles").at("regular_full").is_number_unsigned());
    }
    // the regularized LP can only improve on the greedy bill
    CHECK(summary.at("controllers").at("lp").at("yearly_bill_eur").get<double>() <=
          summary.at("controllers").at("greedy").at("yearly_bill_eur").get<double>() + 0.01);

    std::ifstream sched(dir / "schedule_lp.csv");
    std::string line;
    std::getline(sched, line);
    CHECK(line == "step,timestamp,soc_kwh,p_charge_kw,p_discharge_kw,e_buy_kwh,e_sell_kwh");
    std::size_t rows = 0;
    while (std::getline(sched, line)) ++rows;
    CHECK(rows == 96);
    std::filesystem::remove_all(dir);
}

TEST_CASE("artifacts are byte-identical across reruns and jobs settings") {
    auto cfg = parse_scenario(small_scenario_json(), ".");
    auto dir_a = fresh_dir("bessim_scn_repro_a");
    auto dir_b = fresh_dir("bessim_scn_repro_b");

    cfg.output_dir = dir_a;
    auto first = run_simulate_community(cfg, 1);
    auto range_a = run_price_range(cfg, 1);
    cfg.output_dir = dir_b;
    auto second = run_simulate_community(cfg, 3);
    auto range_b = run_price_range(cfg, 3);

    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i)
        CHECK(read_file(first[i]) == read_file(second[i]));
    for (std::size_t i = 0; i < range_a.size(); ++i)
        CHECK(read_file(range_a[i]) == read_file(range_b[i]));
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("simulate-market reports the fleet profit") {
    auto dir = fresh_dir("bessim_scn_market");
    auto cfg = parse_scenario(small_scenario_json(), ".");
    cfg.output_dir = dir;
    auto paths = run_simulate_market(cfg);
    REQUIRE(paths.size() == 2);
    auto summary = nlohmann::json::parse(read_file(dir / "market_summary.json"));
    CHECK(summary.at("capacity_kwh") == 10.0);
    CHECK(summary.at("eod_min_frac") == 0.5);
    CHECK(summary.at("profit_eur").is_number());
    CHECK(summary.at("steps") == 96);
    std::filesystem::remove_all(dir);
}

TEST_CASE("price-range and size agree with the pricing library") {
    auto dir = fresh_dir("bessim_scn_sweep");
    auto cfg = parse_scenario(small_scenario_json(), ".");
    cfg.output_dir = dir;
    run_price_range(cfg, 2);
    run_size(cfg, 2);

    auto region = nlohmann::json::parse(read_file(dir / "feasible_region.json"));
    CHECK(region.at("empty").is_boolean());
    CHECK(region.at("points").is_array());

    auto result = nlohmann::json::parse(read_file(dir / "scenario_result.json"));
    const double reported_cost = result.at("annual_cost_eur").get<double>();
    const double reported_cap = result.at("optimal_capacity_kwh").get<double>();

    // Recompute through the pricing module directly.
    auto data = assemble_inputs(cfg);
    PricingInputs in;
    in.gen_kw = data.gen_kw;
    in.demand_kw = data.demand_kw;
    in.tariff = data.tariff;
    in.tariff_label = "flat";
    in.day_ahead_eur_kwh = data.day_ahead_eur_kwh;
    in.full_market_capacity_kwh = cfg.market.full_capacity_kwh;
    in.market_eod_min_frac = cfg.market.eod_min_frac;
    in.turbine_cost_eur_per_year =
        cfg.turbine.capacity_kw * cfg.turbine.price_per_kw / cfg.turbine.amortization_years;
    auto best = optimal_capacity(in, cfg.capacities);
    CHECK(reported_cap == best.optimal_capacity_kwh);
    CHECK(reported_cost == doctest::Approx(best.annual_cost_eur).epsilon(1e-6).scale(0.01));

    std::ifstream sizing(dir / "sizing.csv");
    std::string line;
    std::getline(sizing, line);
    CHECK(line == "capacity_kwh,total_cost_eur,savings_eur");
    std::size_t rows = 0;
    while (std::getline(sizing, line)) ++rows;
    CHECK(rows == 3); // one per sweep capacity

    std::ifstream cosizing(dir / "cosizing.csv");
    std::getline(cosizing, line);
    CHECK(line == "r_gen,optimal_capacity_kwh,total_cost_eur");
    rows = 0;
    while (std::getline(cosizing, line)) ++rows;
    CHECK(rows == 2); // one per r value
    std::filesystem::remove_all(dir);
}

TEST_CASE("gen-data emits csvs that assemble to the identical bundle") {
    auto dir = fresh_dir("bessim_scn_gendata");
    auto cfg = parse_scenario(small_scenario_json(), ".");
    cfg.output_dir = dir;
    auto paths = run_gen_data(cfg);
    REQUIRE(paths.size() == 3);
    for (const auto& p : paths) CHECK(std::filesystem::exists(p));

    auto from_synth = assemble_inputs(cfg);
    auto file_cfg = cfg;
    file_cfg.demand = {false, dir / "demand.csv"};
    file_cfg.wind = {false, dir / "wind.csv"};
    file_cfg.prices = {false, dir / "prices.csv"};
    auto from_files = assemble_inputs(file_cfg);
    CHECK(from_files.demand_kw.values == from_synth.demand_kw.values);
    CHECK(from_files.gen_kw.values == from_synth.gen_kw.values);
    CHECK(from_files.day_ahead_eur_kwh.values == from_synth.day_ahead_eur_kwh.values);
    std::filesystem::remove_all(dir);
}
