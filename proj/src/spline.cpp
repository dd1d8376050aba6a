#include "bessim/spline.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "bessim/errors.hpp"

namespace bessim {

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
        throw InterpolationError("cubic spline needs at least 2 knots and matching x/y sizes");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1]))
            throw InterpolationError("cubic spline knots must be strictly increasing");

    m_.assign(n, 0.0);
    if (n == 2)
        return; // linear segment, second derivatives stay zero

    // Tridiagonal system for interior second derivatives (natural ends).
    const std::size_t k = n - 2;
    std::vector<double> diag(k), rhs(k), sub(k), sup(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double h0 = x_[i + 1] - x_[i];
        const double h1 = x_[i + 2] - x_[i + 1];
        sub[i] = h0;
        diag[i] = 2.0 * (h0 + h1);
        sup[i] = h1;
        rhs[i] = 6.0 * ((y_[i + 2] - y_[i + 1]) / h1 - (y_[i + 1] - y_[i]) / h0);
    }
    // Thomas algorithm.
    for (std::size_t i = 1; i < k; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    m_[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t i = k - 1; i-- > 0;)
        m_[i + 1] = (rhs[i] - sup[i] * m_[i + 2]) / diag[i];
}

double CubicSpline::operator()(double t) const {
    const double lo = x_.front();
    const double hi = x_.back();
    const double slack = 1e-9 * std::max(1.0, hi - lo);
    if (t < lo - slack || t > hi + slack)
        throw InterpolationError("spline evaluation outside knot range");
    t = std::clamp(t, lo, hi);

    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    if (i >= x_.size() - 1)
        i = x_.size() - 2;

    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - t) / h;
    const double b = (t - x_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

} // namespace bessim
