#include "bessim/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "bessim/errors.hpp"

namespace bessim {

namespace {

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);            // [0, 399]
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;  // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;           // [0, 146096]
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);                 // [0, 146096]
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;   // [0, 399]
    const int yr = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);                 // [0, 365]
    const unsigned mp = (5 * doy + 2) / 153;                                      // [0, 11]
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = yr + (m <= 2);
}

bool parse_uint(const std::string& s, size_t pos, size_t len, unsigned& out) {
    if (pos + len > s.size()) return false;
    unsigned v = 0;
    for (size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + static_cast<unsigned>(s[i] - '0');
    }
    out = v;
    return true;
}

} // namespace

std::int64_t parse_iso8601_utc(const std::string& s) {
    // YYYY-MM-DD[T ]HH:MM[:SS][Z]
    unsigned y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
    auto fail = [&]() -> std::int64_t {
        throw LoadError("malformed timestamp '" + s + "'");
    };
    if (s.size() < 16) return fail();
    if (!parse_uint(s, 0, 4, y) || s[4] != '-' || !parse_uint(s, 5, 2, mo) || s[7] != '-' ||
        !parse_uint(s, 8, 2, d))
        return fail();
    if (s[10] != 'T' && s[10] != ' ') return fail();
    if (!parse_uint(s, 11, 2, h) || s[13] != ':' || !parse_uint(s, 14, 2, mi)) return fail();
    size_t pos = 16;
    if (pos < s.size() && s[pos] == ':') {
        if (!parse_uint(s, pos + 1, 2, se)) return fail();
        pos += 3;
    }
    if (pos < s.size() && s[pos] == 'Z') ++pos;
    if (pos != s.size()) return fail();
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || se > 60) return fail();
    return days_from_civil(static_cast<int>(y), mo, d) * 86400 +
           static_cast<std::int64_t>(h) * 3600 + mi * 60 + se;
}

std::string format_iso8601_utc(std::int64_t epoch_s) {
    std::int64_t days = epoch_s / 86400;
    std::int64_t rem = epoch_s % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y;
    unsigned mo, d;
    civil_from_days(days, y, mo, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, mo, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

namespace {

struct RawRow {
    std::int64_t t;
    std::string key;  // household id for demand-long, empty otherwise
    double value;
    size_t line;  // 1-based physical line number in the file
};

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
    return out;
}

double parse_value(const std::string& field, const std::filesystem::path& path, size_t line) {
    double v;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw LoadError(path.string() + ": row " + std::to_string(line) + ": non-numeric value '" +
                        field + "'");
    return v;
}

std::vector<RawRow> read_rows(const std::filesystem::path& path, const std::string& expect_header,
                              bool keyed) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open '" + path.string() + "'");
    std::string line;
    size_t lineno = 0;
    if (!std::getline(in, line)) throw LoadError(path.string() + ": empty file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expect_header)
        throw LoadError(path.string() + ": expected header '" + expect_header + "', got '" + line +
                        "'");
    std::vector<RawRow> rows;
    const size_t want = keyed ? 3 : 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto f = split_fields(line);
        if (f.size() != want)
            throw LoadError(path.string() + ": row " + std::to_string(lineno) + ": expected " +
                            std::to_string(want) + " fields, got " + std::to_string(f.size()));
        RawRow r;
        try {
            r.t = parse_iso8601_utc(f[0]);
        } catch (const LoadError& e) {
            throw LoadError(path.string() + ": row " + std::to_string(lineno) + ": " + e.what());
        }
        if (keyed) {
            r.key = f[1];
            if (r.key.empty())
                throw LoadError(path.string() + ": row " + std::to_string(lineno) +
                                ": empty household_id");
        }
        r.value = parse_value(f[keyed ? 2 : 1], path, lineno);
        r.line = lineno;
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw LoadError(path.string() + ": no data rows");
    return rows;
}

// Infer the base step from sorted distinct timestamps: the smallest gap.
// Every other gap must be an integer multiple of it, else the cadence is
// inconsistent and we name the offending row.
std::int64_t infer_step_s(const std::vector<RawRow>& sorted, const std::filesystem::path& path,
                          std::int64_t fallback_s) {
    std::map<std::int64_t, size_t> diff_count;
    for (size_t i = 1; i < sorted.size(); ++i) {
        const std::int64_t d = sorted[i].t - sorted[i - 1].t;
        if (d > 0) ++diff_count[d];
    }
    if (diff_count.empty()) return fallback_s;  // single distinct timestamp
    const std::int64_t step = diff_count.begin()->first;
    std::int64_t mode = step;
    for (const auto& [d, cnt] : diff_count)
        if (cnt >= diff_count[mode]) mode = d;  // ties favour the coarser cadence

    size_t bad_line = 0;
    for (size_t i = 1; i < sorted.size() && bad_line == 0; ++i)
        if ((sorted[i].t - sorted[i - 1].t) % step != 0) bad_line = sorted[i].line;
    if (bad_line != 0) {
        // Blame the row that set an off-cadence minimal gap when the file
        // otherwise runs at a coarser modal step (a stray sample), else the
        // first row that breaks the cadence.
        if (step != mode) {
            for (size_t i = 1; i < sorted.size(); ++i) {
                if (sorted[i].t - sorted[i - 1].t == step) {
                    bad_line = sorted[i].line;
                    break;
                }
            }
        }
        throw LoadError(path.string() + ": row " + std::to_string(bad_line) +
                        ": inconsistent step (gaps are not all multiples of " +
                        std::to_string(step) + " s)");
    }
    return step;
}

TimeSeries load_single_series(const std::filesystem::path& path, const std::string& header,
                              Unit unit, std::int64_t fallback_step_s, double scale) {
    auto rows = read_rows(path, header, /*keyed=*/false);
    std::stable_sort(rows.begin(), rows.end(),
                     [](const RawRow& a, const RawRow& b) { return a.t < b.t; });
    for (size_t i = 1; i < rows.size(); ++i)
        if (rows[i].t == rows[i - 1].t)
            throw LoadError(path.string() + ": row " + std::to_string(rows[i].line) +
                            ": duplicate timestamp " + format_iso8601_utc(rows[i].t));
    const std::int64_t step_s = infer_step_s(rows, path, fallback_step_s);

    TimeSeries ts;
    ts.start_epoch_s = rows.front().t;
    ts.step_hours = static_cast<double>(step_s) / 3600.0;
    ts.unit = unit;
    const size_t n = static_cast<size_t>((rows.back().t - rows.front().t) / step_s) + 1;
    ts.values.assign(n, std::numeric_limits<double>::quiet_NaN());
    for (const auto& r : rows) {
        const size_t idx = static_cast<size_t>((r.t - ts.start_epoch_s) / step_s);
        ts.values[idx] = r.value * scale;
    }
    for (size_t i = 0; i < n; ++i)
        if (std::isnan(ts.values[i])) ts.missing.push_back(i);
    return ts;
}

} // namespace

TimeSeries load_wind_csv(const std::filesystem::path& path) {
    return load_single_series(path, "timestamp,wind_speed_ms", Unit::MetersPerSecond, 3600, 1.0);
}

TimeSeries load_day_ahead_csv(const std::filesystem::path& path) {
    // €/MWh on disk, €/kWh in memory.
    return load_single_series(path, "timestamp,price_eur_per_mwh", Unit::EurPerKilowattHour, 3600,
                              1e-3);
}

HouseholdDemandSet load_demand_csv(const std::filesystem::path& path) {
    auto rows = read_rows(path, "timestamp,household_id,demand_kwh", /*keyed=*/true);
    std::stable_sort(rows.begin(), rows.end(), [](const RawRow& a, const RawRow& b) {
        return a.t != b.t ? a.t < b.t : a.key < b.key;
    });
    for (size_t i = 1; i < rows.size(); ++i)
        if (rows[i].t == rows[i - 1].t && rows[i].key == rows[i - 1].key)
            throw LoadError(path.string() + ": row " + std::to_string(rows[i].line) +
                            ": duplicate timestamp " + format_iso8601_utc(rows[i].t) +
                            " for household '" + rows[i].key + "'");

    // One shared timeline across all households so the set is aligned.
    std::vector<RawRow> distinct;
    for (const auto& r : rows)
        if (distinct.empty() || distinct.back().t != r.t) distinct.push_back(r);
    const std::int64_t step_s = infer_step_s(distinct, path, 1800);
    const std::int64_t start = distinct.front().t;
    const size_t n = static_cast<size_t>((distinct.back().t - start) / step_s) + 1;

    HouseholdDemandSet set;
    for (const auto& r : rows) {
        auto [it, fresh] = set.households.try_emplace(r.key);
        if (fresh) {
            it->second.start_epoch_s = start;
            it->second.step_hours = static_cast<double>(step_s) / 3600.0;
            it->second.unit = Unit::KilowattHour;
            it->second.values.assign(n, std::numeric_limits<double>::quiet_NaN());
        }
        const size_t idx = static_cast<size_t>((r.t - start) / step_s);
        it->second.values[idx] = r.value;
    }
    for (auto& [id, ts] : set.households)
        for (size_t i = 0; i < n; ++i)
            if (std::isnan(ts.values[i])) ts.missing.push_back(i);
    return set;
}

namespace {

void write_single_series(const std::filesystem::path& path, const std::string& header,
                         const TimeSeries& ts, double scale) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write '" + path.string() + "'");
    out << header << '\n';
    for (size_t i = 0; i < ts.size(); ++i) {
        if (ts.is_missing(i)) continue;  // gaps stay absent on disk
        out << format_iso8601_utc(ts.timestamp_at(i)) << ',' << format_double(ts.values[i] * scale)
            << '\n';
    }
    if (!out) throw LoadError("write failed for '" + path.string() + "'");
}

} // namespace

void write_wind_csv(const std::filesystem::path& path, const TimeSeries& ts) {
    write_single_series(path, "timestamp,wind_speed_ms", ts, 1.0);
}

void write_day_ahead_csv(const std::filesystem::path& path, const TimeSeries& ts_eur_per_mwh) {
    write_single_series(path, "timestamp,price_eur_per_mwh", ts_eur_per_mwh, 1.0);
}

void write_demand_csv(const std::filesystem::path& path, const HouseholdDemandSet& set) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write '" + path.string() + "'");
    out << "timestamp,household_id,demand_kwh\n";
    if (set.households.empty()) return;
    const size_t n = set.households.begin()->second.size();
    for (size_t i = 0; i < n; ++i) {
        for (const auto& [id, ts] : set.households) {
            if (ts.is_missing(i)) continue;
            out << format_iso8601_utc(ts.timestamp_at(i)) << ',' << id << ','
                << format_double(ts.values[i]) << '\n';
        }
    }
    if (!out) throw LoadError("write failed for '" + path.string() + "'");
}

} // namespace bessim
