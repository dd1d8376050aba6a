#pragma once

#include <filesystem>
#include <vector>

#include "bessim/timeseries.hpp"

namespace bessim {

/// One extracted charge/discharge excursion, in percent of usable
/// capacity. Regular cycles reach the 100% level (within a small
/// tolerance, then snapped); everything else is irregular.
struct CycleRecord {
    enum class Kind { Regular, Irregular };
    Kind kind = Kind::Irregular;
    double weight = 1.0; // 1 = full cycle, 0.5 = half cycle
    double soc_start_pct = 0.0; // upper SoC of the excursion
    double soc_end_pct = 0.0;   // lower SoC of the excursion
    double dod_pct = 0.0;       // soc_start_pct - soc_end_pct
};

/// Manufacturer-style cycle-life table: maximum number of full cycles at
/// each depth of discharge. Lookups interpolate log(N) linearly in DoD
/// and extrapolate the first segment below the table's smallest DoD.
struct LifeCurve {
    std::vector<std::pair<double, double>> points; // (dod_pct, n_cycles_max)

    void validate() const; // strictly increasing DoD up to 100, N positive decreasing
    double cycles_at(double dod_pct) const;
};

/// Synthetic default cycle-life table (power-law shaped, NOT manufacturer
/// data): N(d) = 3000 * (100/d)^1.1 sampled every 5% DoD.
LifeCurve synthetic_life_curve();

/// Load `dod_pct,n_cycles_max` rows.
LifeCurve load_life_curve_csv(const std::filesystem::path& path);
void write_life_curve_csv(const std::filesystem::path& path, const LifeCurve& curve);

/// Rainflow cycle extraction over a SoC trajectory: turning-point
/// reduction, three-point closure collecting matched excursions as full
/// cycles, residual excursions as half cycles.
std::vector<CycleRecord> rainflow_extract(const TimeSeries& soc_kwh, double soc_max_kwh);

/// Depth of discharge equivalent to discharging from 100% down to the
/// given SoC percentage.
double dod_equivalent(double soc_pct);

/// Total depreciation factor: regular cycles consume weight/N(DoD),
/// irregular ones weight * |1/N(DoD_eq(start)) - 1/N(DoD_eq(end))|.
double depreciation_factor(const std::vector<CycleRecord>& cycles, const LifeCurve& life);

/// Cycle-count bookkeeping for reports.
struct DegradationSummary {
    double df = 0.0;
    std::size_t regular_full = 0;
    std::size_t regular_half = 0;
    std::size_t irregular_full = 0;
    std::size_t irregular_half = 0;
};

DegradationSummary summarize_degradation(const std::vector<CycleRecord>& cycles,
                                         const LifeCurve& life);

} // namespace bessim
