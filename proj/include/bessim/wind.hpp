#pragma once

#include "bessim/timeseries.hpp"

namespace bessim {

/// Turbine parameters. Defaults describe the 330 kW reference machine
/// used throughout: logarithmic shear from 10 m anemometer height to a
/// 50 m hub over 0.03 m roughness, sigmoid power curve, €1200/kW
/// amortized over 20 years.
struct TurbineModel {
    double capacity_kw = 330.0;
    double sigmoid_a = 0.7526;        // s/m, curve steepness
    double sigmoid_b = 8.424;         // m/s, midpoint speed
    double hub_height_m = 50.0;       // z_h
    double anemometer_height_m = 10.0; // z_a
    double roughness_m = 0.03;        // z_0
    double price_per_kw = 1200.0;     // €
    double amortization_years = 20.0;

    void validate() const; // throws ConfigError on bad geometry/params
};

/// Log-profile shear extrapolation from anemometer to hub height:
/// u_h = u_a * log(z_h/z_0) / log(z_a/z_0).
double shear_extrapolate(double u_a_ms, const TurbineModel& model);

/// Sigmoid power curve: capacity / (1 + exp(-a * (u_h - b))). Output is
/// strictly inside (0, capacity).
double turbine_power(double u_h_ms, const TurbineModel& model);

/// Map a gap-free half-hourly 10 m wind-speed series to turbine power
/// (kW per step).
TimeSeries generation_series(const TimeSeries& wind_halfhourly, const TurbineModel& model);

/// Wind generation coefficient R_gen = Σ g_i / Σ d_i (both per-step
/// energies or both powers on the same grid).
double generation_coefficient(const TimeSeries& gen, const TimeSeries& demand);

struct ScaledGeneration {
    TimeSeries gen;         // scaled series
    double capacity_kw;     // scaled turbine capacity
    double annual_cost_eur; // capacity * price_per_kw / amortization_years
};

/// Rescale `gen` so its generation coefficient against `demand` equals
/// r_target, reporting the implied turbine capacity and its amortized
/// yearly cost.
ScaledGeneration scale_to_coefficient(const TimeSeries& gen, const TimeSeries& demand,
                                      double r_target, const TurbineModel& model);

} // namespace bessim
