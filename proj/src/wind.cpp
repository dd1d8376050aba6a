#include "bessim/wind.hpp"

#include <cmath>

#include "bessim/errors.hpp"

namespace bessim {

void TurbineModel::validate() const {
    if (capacity_kw <= 0.0) throw ConfigError("turbine capacity must be positive");
    if (!(hub_height_m > anemometer_height_m && anemometer_height_m > roughness_m &&
          roughness_m > 0.0))
        throw ConfigError("turbine heights must satisfy z_h > z_a > z_0 > 0");
    if (amortization_years <= 0.0) throw ConfigError("amortization_years must be positive");
    if (price_per_kw < 0.0) throw ConfigError("price_per_kw must be nonnegative");
}

double shear_extrapolate(double u_a_ms, const TurbineModel& model) {
    if (model.hub_height_m == model.anemometer_height_m) return u_a_ms;
    const double factor = std::log(model.hub_height_m / model.roughness_m) /
                          std::log(model.anemometer_height_m / model.roughness_m);
    return u_a_ms * factor;
}

double turbine_power(double u_h_ms, const TurbineModel& model) {
    return model.capacity_kw / (1.0 + std::exp(-model.sigmoid_a * (u_h_ms - model.sigmoid_b)));
}

TimeSeries generation_series(const TimeSeries& wind_halfhourly, const TurbineModel& model) {
    model.validate();
    if (!wind_halfhourly.gap_free())
        throw ConfigError("wind series has gaps; run fill_and_resample first");
    TimeSeries out;
    out.start_epoch_s = wind_halfhourly.start_epoch_s;
    out.step_hours = wind_halfhourly.step_hours;
    out.unit = Unit::Kilowatt;
    out.values.reserve(wind_halfhourly.size());
    for (double u : wind_halfhourly.values)
        out.values.push_back(turbine_power(shear_extrapolate(u, model), model));
    return out;
}

double generation_coefficient(const TimeSeries& gen, const TimeSeries& demand) {
    if (!gen.aligned_with(demand))
        throw AlignmentError("generation and demand series are not aligned");
    double sg = 0.0, sd = 0.0;
    for (double v : gen.values) sg += v;
    for (double v : demand.values) sd += v;
    if (sd <= 0.0) throw ConfigError("total demand is zero; generation coefficient undefined");
    return sg / sd;
}

ScaledGeneration scale_to_coefficient(const TimeSeries& gen, const TimeSeries& demand,
                                      double r_target, const TurbineModel& model) {
    model.validate();
    if (r_target < 0.0) throw ConfigError("r_target must be nonnegative");
    const double r_now = generation_coefficient(gen, demand);
    if (r_now <= 0.0) throw ConfigError("total generation is zero; cannot rescale");
    const double s = r_target / r_now;
    ScaledGeneration out{scaled(gen, s), s * model.capacity_kw,
                         s * model.capacity_kw * model.price_per_kw / model.amortization_years};
    return out;
}

} // namespace bessim
