#include "bessim/synthdata.hpp"

#include <array>
#include <cmath>
#include <random>
#include <string>

#include "bessim/errors.hpp"

namespace bessim {

namespace {

constexpr std::uint64_t kDemandStream = 1;
constexpr std::uint64_t kWindStream = 2;
constexpr std::uint64_t kWindGapStream = 3;
constexpr std::uint64_t kPriceStream = 4;

std::uint64_t mix64(std::uint64_t x) { // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// mt19937_64 with explicit distribution transforms. The standard
/// distribution objects are implementation-defined, so uniform, normal,
/// and Weibull draws are derived here to keep byte-identical output
/// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double normal() { // Box-Muller, spare cached
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(1.0 - uniform()));
        const double theta = 2.0 * std::acos(-1.0) * uniform();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double weibull(double k, double scale) {
        return scale * std::pow(-std::log(1.0 - uniform()), 1.0 / k);
    }

    /// Unit-mean lognormal: exp(sigma Z - sigma^2/2).
    double lognormal(double sigma) { return std::exp(sigma * normal() - 0.5 * sigma * sigma); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

double require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError(std::string(what) + " must be positive and finite");
    return v;
}

double require_prob(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError(std::string(what) + " must lie in [0, 1]");
    return v;
}

/// Normalized diurnal shape: unit mean over 48 half-hours, with morning
/// (08:00) and evening (19:00) Gaussian peaks rising to `peak_factor`
/// times the off-peak base.
std::array<double, 48> diurnal_shape(double peak_factor) {
    std::array<double, 48> shape{};
    double sum = 0.0;
    for (int s = 0; s < 48; ++s) {
        const double morning = std::exp(-0.5 * ((s - 16.0) / 3.0) * ((s - 16.0) / 3.0));
        const double evening = std::exp(-0.5 * ((s - 38.0) / 4.0) * ((s - 38.0) / 4.0));
        shape[static_cast<std::size_t>(s)] =
            1.0 + (peak_factor - 1.0) * (0.6 * morning + evening);
        sum += shape[static_cast<std::size_t>(s)];
    }
    for (double& v : shape) v *= 48.0 / sum;
    return shape;
}

std::string household_id(int index, int count) {
    int width = 1;
    for (int c = count - 1; c >= 10; c /= 10) ++width;
    if (width < 3) width = 3;
    std::string digits = std::to_string(index);
    return "h" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits;
}

} // namespace

void SynthConfig::validate() const {
    if (households < 1) throw ConfigError("households must be at least 1");
    if (days < 1) throw ConfigError("days must be at least 1");
    require_positive(demand_mean_kwh_per_halfhour, "demand_mean_kwh_per_halfhour");
    require_positive(demand_peak_factor, "demand_peak_factor");
    require_positive(wind_weibull_k, "wind_weibull_k");
    require_positive(wind_weibull_scale_ms, "wind_weibull_scale_ms");
    if (!(wind_ar1_rho >= 0.0 && wind_ar1_rho < 1.0))
        throw ConfigError("wind_ar1_rho must lie in [0, 1)");
    if (!(wind_gap_prob >= 0.0 && wind_gap_prob < 1.0))
        throw ConfigError("wind_gap_prob must lie in [0, 1)");
    if (!std::isfinite(price_mean_eur_mwh))
        throw ConfigError("price_mean_eur_mwh must be finite");
    if (!(price_daily_amplitude >= 0.0) || !std::isfinite(price_daily_amplitude))
        throw ConfigError("price_daily_amplitude must be nonnegative and finite");
    if (!(price_noise_sd >= 0.0) || !std::isfinite(price_noise_sd))
        throw ConfigError("price_noise_sd must be nonnegative and finite");
    require_prob(price_negative_prob, "price_negative_prob");
}

std::uint64_t substream_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index) {
    return mix64(mix64(mix64(root) ^ stream) ^ index);
}

HouseholdDemandSet gen_demand(const SynthConfig& cfg) {
    cfg.validate();
    const auto shape = diurnal_shape(cfg.demand_peak_factor);
    const std::size_t steps = static_cast<std::size_t>(cfg.days) * 48;
    HouseholdDemandSet set;
    for (int h = 0; h < cfg.households; ++h) {
        Rng rng(substream_seed(cfg.seed, kDemandStream, static_cast<std::uint64_t>(h)));
        const double household_scale = rng.lognormal(0.25);
        TimeSeries ts;
        ts.start_epoch_s = cfg.start_epoch_s;
        ts.step_hours = 0.5;
        ts.unit = Unit::KilowattHour;
        ts.values.reserve(steps);
        for (std::size_t i = 0; i < steps; ++i)
            ts.values.push_back(cfg.demand_mean_kwh_per_halfhour * shape[i % 48] *
                                household_scale * rng.lognormal(0.2));
        set.households.emplace(household_id(h, cfg.households), std::move(ts));
    }
    return set;
}

TimeSeries gen_wind(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t steps = static_cast<std::size_t>(cfg.days) * 24;
    Rng rng(substream_seed(cfg.seed, kWindStream));
    TimeSeries ts;
    ts.start_epoch_s = cfg.start_epoch_s;
    ts.step_hours = 1.0;
    ts.unit = Unit::MetersPerSecond;
    ts.values.reserve(steps);
    double z = rng.normal();
    const double innovation = std::sqrt(1.0 - cfg.wind_ar1_rho * cfg.wind_ar1_rho);
    for (std::size_t i = 0; i < steps; ++i) {
        if (i > 0) z = cfg.wind_ar1_rho * z + innovation * rng.normal();
        // Gaussian copula: N(0,1) marginal -> uniform -> Weibull quantile.
        double u = 0.5 * std::erfc(-z / std::sqrt(2.0));
        u = std::min(std::max(u, 1e-12), 1.0 - 1e-12);
        ts.values.push_back(cfg.wind_weibull_scale_ms *
                            std::pow(-std::log(1.0 - u), 1.0 / cfg.wind_weibull_k));
    }
    if (cfg.wind_gap_prob > 0.0 && steps > 2) {
        Rng gaps(substream_seed(cfg.seed, kWindGapStream));
        for (std::size_t i = 1; i + 1 < steps; ++i)
            if (gaps.uniform() < cfg.wind_gap_prob) ts.missing.push_back(i);
    }
    return ts;
}

TimeSeries gen_prices(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t steps = static_cast<std::size_t>(cfg.days) * 24;
    Rng rng(substream_seed(cfg.seed, kPriceStream));
    TimeSeries ts;
    ts.start_epoch_s = cfg.start_epoch_s;
    ts.step_hours = 1.0;
    ts.unit = Unit::EurPerMegawattHour;
    ts.values.reserve(steps);
    const double two_pi = 2.0 * std::acos(-1.0);
    for (std::size_t i = 0; i < steps; ++i) {
        const double hour = static_cast<double>(i % 24);
        double noise = cfg.price_noise_sd * rng.normal();
        noise = std::min(std::max(noise, -3.0 * cfg.price_noise_sd), 3.0 * cfg.price_noise_sd);
        double v = cfg.price_mean_eur_mwh +
                   cfg.price_daily_amplitude * std::sin(two_pi * (hour - 6.0) / 24.0) + noise;
        if (rng.uniform() < cfg.price_negative_prob) v = -(0.25 * std::abs(v) + 5.0);
        ts.values.push_back(v);
    }
    return ts;
}

} // namespace bessim
