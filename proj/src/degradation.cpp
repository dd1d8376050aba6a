#include "bessim/degradation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "bessim/csv.hpp"
#include "bessim/errors.hpp"

namespace bessim {

namespace {

constexpr double kRegularTolPct = 0.5; // snap-to-100% classification band

double parse_field(const std::string& field, const std::string& context) {
    double v = 0.0;
    const char* b = field.data();
    const char* e = b + field.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || ptr != e || !std::isfinite(v))
        throw LoadError("malformed number '" + field + "' at " + context);
    return v;
}

} // namespace

void LifeCurve::validate() const {
    if (points.size() < 2) throw ConfigError("life curve needs at least two (DoD, N) points");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& [dod, n] = points[i];
        if (!(dod > 0.0) || dod > 100.0)
            throw ConfigError("life curve DoD values must lie in (0, 100]");
        if (!(n > 0.0) || !std::isfinite(n))
            throw ConfigError("life curve cycle counts must be positive and finite");
        if (i > 0) {
            if (dod <= points[i - 1].first)
                throw ConfigError("life curve DoD values must be strictly increasing");
            if (n >= points[i - 1].second)
                throw ConfigError("life curve cycle counts must be strictly decreasing");
        }
    }
    if (points.back().first < 100.0 - 1e-9)
        throw ConfigError("life curve must cover DoD up to 100%");
}

double LifeCurve::cycles_at(double dod_pct) const {
    if (!(dod_pct >= 0.0) || dod_pct > 100.0 + 1e-9)
        throw ConfigError("DoD lookup outside [0, 100]%");
    // Locate the segment; queries below the first point extrapolate the
    // first segment so shallow cycles get a finite (large) lifetime.
    std::size_t hi = 1;
    while (hi + 1 < points.size() && points[hi].first < dod_pct) ++hi;
    const auto& [d0, n0] = points[hi - 1];
    const auto& [d1, n1] = points[hi];
    const double t = (dod_pct - d0) / (d1 - d0);
    return std::exp(std::log(n0) + t * (std::log(n1) - std::log(n0)));
}

LifeCurve synthetic_life_curve() {
    LifeCurve curve;
    for (int dod = 5; dod <= 100; dod += 5)
        curve.points.emplace_back(dod, 3000.0 * std::pow(100.0 / dod, 1.1));
    curve.validate();
    return curve;
}

LifeCurve load_life_curve_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw LoadError("'" + path.string() + "' is empty");
    LifeCurve curve;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw LoadError("missing field at row " + std::to_string(row) + " of '" +
                            path.string() + "'");
        const std::string ctx = "row " + std::to_string(row) + " of '" + path.string() + "'";
        curve.points.emplace_back(parse_field(line.substr(0, comma), ctx),
                                  parse_field(line.substr(comma + 1), ctx));
    }
    curve.validate();
    return curve;
}

void write_life_curve_csv(const std::filesystem::path& path, const LifeCurve& curve) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write '" + path.string() + "'");
    out << "dod_pct,n_cycles_max\n";
    for (const auto& [dod, n] : curve.points)
        out << format_double(dod) << ',' << format_double(n) << '\n';
    if (!out) throw LoadError("write failed for '" + path.string() + "'");
}

std::vector<CycleRecord> rainflow_extract(const TimeSeries& soc_kwh, double soc_max_kwh) {
    if (soc_kwh.values.empty()) throw ConfigError("rainflow needs a nonempty SoC series");
    if (!(soc_max_kwh > 0.0)) throw ConfigError("rainflow needs a positive soc_max");
    constexpr double tol = 1e-6;
    std::vector<double> pct;
    pct.reserve(soc_kwh.size());
    for (double v : soc_kwh.values) {
        if (v < -tol * soc_max_kwh || v > soc_max_kwh * (1.0 + tol))
            throw ConfigError("SoC sample outside [0, soc_max]");
        pct.push_back(std::clamp(100.0 * v / soc_max_kwh, 0.0, 100.0));
    }

    // Turning-point reduction: keep strict local extrema plus endpoints.
    std::vector<double> turns;
    for (double v : pct) {
        while (turns.size() >= 2) {
            const double a = turns[turns.size() - 2];
            const double b = turns.back();
            const bool monotone = (b - a) * (v - b) >= 0.0;
            if (!monotone) break;
            turns.pop_back();
        }
        if (turns.empty() || turns.back() != v) turns.push_back(v);
    }

    const auto make_record = [](double a, double b, double weight) {
        CycleRecord r;
        r.weight = weight;
        r.soc_start_pct = std::max(a, b);
        r.soc_end_pct = std::min(a, b);
        if (r.soc_start_pct >= 100.0 - kRegularTolPct) {
            r.kind = CycleRecord::Kind::Regular;
            r.soc_start_pct = 100.0;
        } else {
            r.kind = CycleRecord::Kind::Irregular;
        }
        r.dod_pct = r.soc_start_pct - r.soc_end_pct;
        return r;
    };

    std::vector<CycleRecord> cycles;
    std::vector<double> stack;
    for (double v : turns) {
        stack.push_back(v);
        // Three-point closure: an inner excursion bracketed by a larger or
        // equal range is one full cycle.
        while (stack.size() >= 3) {
            const double y = std::abs(stack[stack.size() - 2] - stack[stack.size() - 3]);
            const double x = std::abs(stack.back() - stack[stack.size() - 2]);
            if (x < y) break;
            cycles.push_back(
                make_record(stack[stack.size() - 3], stack[stack.size() - 2], 1.0));
            stack.erase(stack.end() - 3, stack.end() - 1);
        }
    }
    // Residual: unpaired excursions count as half cycles.
    for (std::size_t i = 0; i + 1 < stack.size(); ++i)
        cycles.push_back(make_record(stack[i], stack[i + 1], 0.5));
    return cycles;
}

double dod_equivalent(double soc_pct) {
    if (soc_pct < 0.0 || soc_pct > 100.0)
        throw ConfigError("SoC percentage outside [0, 100]");
    return 100.0 - soc_pct;
}

double depreciation_factor(const std::vector<CycleRecord>& cycles, const LifeCurve& life) {
    life.validate();
    double df = 0.0;
    for (const auto& c : cycles) {
        if (c.kind == CycleRecord::Kind::Regular) {
            df += c.weight / life.cycles_at(c.dod_pct);
        } else {
            df += c.weight * std::abs(1.0 / life.cycles_at(dod_equivalent(c.soc_start_pct)) -
                                      1.0 / life.cycles_at(dod_equivalent(c.soc_end_pct)));
        }
    }
    return df;
}

DegradationSummary summarize_degradation(const std::vector<CycleRecord>& cycles,
                                         const LifeCurve& life) {
    DegradationSummary s;
    s.df = depreciation_factor(cycles, life);
    for (const auto& c : cycles) {
        const bool full = c.weight == 1.0;
        if (c.kind == CycleRecord::Kind::Regular)
            (full ? s.regular_full : s.regular_half) += 1;
        else
            (full ? s.irregular_full : s.irregular_half) += 1;
    }
    return s;
}

} // namespace bessim
