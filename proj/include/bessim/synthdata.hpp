#pragma once

#include <cstdint>

#include "bessim/timeseries.hpp"

namespace bessim {

/// Seeded synthetic-data parameters. Shapes are plausible rather than
/// calibrated: a double-peak diurnal demand profile, AR(1) wind with a
/// Weibull marginal, and a daily price sinusoid with Gaussian noise.
struct SynthConfig {
    std::uint64_t seed = 1;
    int households = 4;
    int days = 2;
    std::int64_t start_epoch_s = 1672531200; // 2023-01-01T00:00:00Z

    double demand_mean_kwh_per_halfhour = 0.16; // ~2800 kWh/yr per home
    double demand_peak_factor = 1.8;            // peak height over base load

    double wind_weibull_k = 2.0;
    double wind_weibull_scale_ms = 7.0;
    double wind_ar1_rho = 0.8;
    double wind_gap_prob = 0.0; // interior samples dropped as gaps

    double price_mean_eur_mwh = 95.0;
    double price_daily_amplitude = 35.0;
    double price_noise_sd = 12.0;
    double price_negative_prob = 0.0;

    void validate() const; // throws ConfigError
};

/// Deterministic substream seed: a splitmix64 finalizer chain over
/// (root, stream, index). Every generator draws from its own substream,
/// so outputs are reproducible regardless of evaluation order or worker
/// count.
std::uint64_t substream_seed(std::uint64_t root, std::uint64_t stream,
                             std::uint64_t index = 0);

/// Half-hourly per-household demand (kWh per step): shared double-peak
/// diurnal shape scaled per household and per step by unit-mean lognormal
/// noise. Household `k` draws from substream (seed, demand, k), so adding
/// households never changes existing ones.
HouseholdDemandSet gen_demand(const SynthConfig& cfg);

/// Hourly 10 m wind speed (m/s): a stationary AR(1) Gaussian process
/// mapped through the normal CDF onto a Weibull marginal. Gap injection
/// uses a separate substream, so the surviving values are identical for
/// any wind_gap_prob. The first and last samples are never dropped.
TimeSeries gen_wind(const SynthConfig& cfg);

/// Hourly day-ahead prices (EUR/MWh): daily sinusoid plus Gaussian noise
/// clipped at three standard deviations; each step is independently
/// pushed to a negative value with probability price_negative_prob.
TimeSeries gen_prices(const SynthConfig& cfg);

} // namespace bessim
