#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"

#include "bessim/csv.hpp"
#include "bessim/errors.hpp"

using namespace bessim;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    auto p = fs::temp_directory_path() / name;
    fs::remove(p);
    return p;
}

void write_text(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

} // namespace

TEST_CASE("ISO-8601 UTC parse and format round-trip") {
    CHECK(parse_iso8601_utc("1970-01-01T00:00:00Z") == 0);
    CHECK(parse_iso8601_utc("2023-01-01T00:00:00Z") == 1672531200);
    CHECK(parse_iso8601_utc("2023-01-01 13:30:00") == 1672531200 + 13 * 3600 + 1800);
    CHECK(parse_iso8601_utc("2023-01-01T13:30") == 1672531200 + 13 * 3600 + 1800);
    CHECK(format_iso8601_utc(1672531200) == "2023-01-01T00:00:00Z");
    // 2024 is a leap year: Feb 29 exists.
    const auto feb29 = parse_iso8601_utc("2024-02-29T12:00:00Z");
    CHECK(format_iso8601_utc(feb29) == "2024-02-29T12:00:00Z");
    CHECK_THROWS_AS(parse_iso8601_utc("2023/01/01 00:00:00"), LoadError);
    CHECK_THROWS_AS(parse_iso8601_utc("not a time"), LoadError);
}

TEST_CASE("48 demand rows load as one household, step 0.5 h") {
    auto p = temp_file("demand48.csv");
    std::string body = "timestamp,household_id,demand_kwh\n";
    for (int i = 0; i < 48; ++i) {
        char ts[32];
        std::snprintf(ts, sizeof ts, "2023-01-01T%02d:%02d:00Z", i / 2, (i % 2) * 30);
        body += std::string(ts) + ",h001," + std::to_string(0.1 * i) + "\n";
    }
    write_text(p, body);
    auto set = load_demand_csv(p);
    REQUIRE(set.count() == 1);
    const auto& ts = set.households.at("h001");
    CHECK(ts.size() == 48);
    CHECK(ts.step_hours == 0.5);
    CHECK(ts.gap_free());
    CHECK(ts.values[3] == doctest::Approx(0.3));
}

TEST_CASE("hourly wind file with one absent hour records the gap index") {
    auto p = temp_file("wind_gap.csv");
    write_text(p,
               "timestamp,wind_speed_ms\n"
               "2023-01-01T00:00:00Z,4.0\n"
               "2023-01-01T01:00:00Z,5.0\n"
               "2023-01-01T03:00:00Z,6.0\n"
               "2023-01-01T04:00:00Z,7.0\n");
    auto ts = load_wind_csv(p);
    CHECK(ts.size() == 5);
    CHECK(ts.step_hours == 1.0);
    REQUIRE(ts.missing.size() == 1);
    CHECK(ts.missing[0] == 2);
    CHECK(ts.is_missing(2));
    CHECK(ts.values[3] == doctest::Approx(6.0));
}

TEST_CASE("duplicate timestamp is rejected with the row number") {
    auto p = temp_file("wind_dup.csv");
    write_text(p,
               "timestamp,wind_speed_ms\n"
               "2023-01-01T00:00:00Z,4.0\n"
               "2023-01-01T01:00:00Z,5.0\n"
               "2023-01-01T01:00:00Z,5.5\n");
    try {
        load_wind_csv(p);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 4") != std::string::npos);
        CHECK(msg.find("duplicate") != std::string::npos);
    }
}

TEST_CASE("unordered rows are sorted on load") {
    auto p = temp_file("wind_shuffled.csv");
    write_text(p,
               "timestamp,wind_speed_ms\n"
               "2023-01-01T02:00:00Z,6.0\n"
               "2023-01-01T00:00:00Z,4.0\n"
               "2023-01-01T01:00:00Z,5.0\n");
    auto ts = load_wind_csv(p);
    CHECK(ts.values == std::vector<double>{4.0, 5.0, 6.0});
}

TEST_CASE("non-numeric value and inconsistent step name the offending row") {
    auto bad = temp_file("wind_bad.csv");
    write_text(bad,
               "timestamp,wind_speed_ms\n"
               "2023-01-01T00:00:00Z,4.0\n"
               "2023-01-01T01:00:00Z,abc\n");
    try {
        load_wind_csv(bad);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }

    auto odd = temp_file("wind_odd_step.csv");
    write_text(odd,
               "timestamp,wind_speed_ms\n"
               "2023-01-01T00:00:00Z,4.0\n"
               "2023-01-01T02:00:00Z,5.0\n"
               "2023-01-01T03:00:00Z,6.0\n");
    // Gaps 2 h then 1 h: base step 1 h, 2 h is a clean multiple → gap, fine.
    CHECK_NOTHROW(load_wind_csv(odd));

    auto incons = temp_file("wind_incons.csv");
    write_text(incons,
               "timestamp,wind_speed_ms\n"
               "2023-01-01T00:00:00Z,4.0\n"
               "2023-01-01T01:00:00Z,5.0\n"
               "2023-01-01T01:45:00Z,6.0\n");
    try {
        load_wind_csv(incons);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("inconsistent step") != std::string::npos);
        CHECK(msg.find("row 4") != std::string::npos);
    }
}

TEST_CASE("day-ahead prices convert from EUR/MWh to EUR/kWh") {
    auto p = temp_file("da.csv");
    write_text(p,
               "timestamp,price_eur_per_mwh\n"
               "2023-01-01T00:00:00Z,150\n"
               "2023-01-01T01:00:00Z,-5.2\n");
    auto ts = load_day_ahead_csv(p);
    CHECK(ts.unit == Unit::EurPerKilowattHour);
    CHECK(ts.values[0] == doctest::Approx(0.150));
    CHECK(ts.values[1] == doctest::Approx(-0.0052));
}

TEST_CASE("wind CSV write/load round-trip preserves values and gaps") {
    TimeSeries ts;
    ts.start_epoch_s = parse_iso8601_utc("2023-06-01T00:00:00Z");
    ts.step_hours = 1.0;
    ts.unit = Unit::MetersPerSecond;
    ts.values = {3.25, 0.0, 7.125, 9.000000001, 11.5};
    ts.missing = {1};
    auto p = temp_file("wind_rt.csv");
    write_wind_csv(p, ts);
    auto back = load_wind_csv(p);
    CHECK(back.size() == ts.size());
    CHECK(back.missing == ts.missing);
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (!ts.is_missing(i)) CHECK(back.values[i] == ts.values[i]);
    CHECK(back.start_epoch_s == ts.start_epoch_s);
}

TEST_CASE("demand CSV write/load round-trip preserves the household map") {
    HouseholdDemandSet set;
    for (int j = 0; j < 3; ++j) {
        TimeSeries ts;
        ts.start_epoch_s = parse_iso8601_utc("2023-06-01T00:00:00Z");
        ts.step_hours = 0.5;
        ts.unit = Unit::KilowattHour;
        for (int i = 0; i < 6; ++i) ts.values.push_back(0.01 * (j + 1) * i);
        set.households["h" + std::to_string(j)] = ts;
    }
    auto p = temp_file("demand_rt.csv");
    write_demand_csv(p, set);
    auto back = load_demand_csv(p);
    REQUIRE(back.count() == 3);
    for (const auto& [id, ts] : set.households) {
        const auto& b = back.households.at(id);
        REQUIRE(b.size() == ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) CHECK(b.values[i] == ts.values[i]);
    }
    back.check_aligned();
}

TEST_CASE("missing file raises a load error") {
    CHECK_THROWS_AS(load_wind_csv("/nonexistent/definitely_absent.csv"), LoadError);
}
