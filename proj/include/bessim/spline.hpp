#pragma once

#include <span>
#include <vector>

namespace bessim {

/// Natural cubic spline through (x, y) knots: C2 interpolant with zero
/// second derivative at both ends. Knots must be strictly increasing.
class CubicSpline {
public:
    CubicSpline(std::span<const double> x, std::span<const double> y);

    /// Evaluate at t. t must lie within [x.front(), x.back()] up to a
    /// small rounding slack; outside that the call throws.
    double operator()(double t) const;

    std::size_t knot_count() const { return x_.size(); }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_; // second derivatives at knots
};

} // namespace bessim
