#pragma once

// Reference values computed without the library's discretisation.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "curveflow/geometry.hpp"

namespace oracles {

using curveflow::Vec3;

/// Arclength of a closed curve given its derivative on [0, 2 pi], adaptive
/// Gauss-Kronrod.
inline double closed_curve_length(const std::function<double(double)>& speed)
{
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 61>::integrate(speed, 0.0, 2.0 * std::numbers::pi, 15, 1e-14);
}

/// Circumference of the ellipse with semi-axes p, q.
inline double ellipse_circumference(double p, double q)
{
    return closed_curve_length([=](double t) { return std::hypot(p * std::sin(t), q * std::cos(t)); });
}

/// Brute-force arclength resampling of a closed polyline: walks the edges and
/// emits the point at every multiple of L / count.
inline std::vector<Vec3> polyline_resample(const std::vector<Vec3>& points, std::size_t count)
{
    const std::size_t n = points.size();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        total += (points[(i + 1) % n] - points[i]).norm();
    std::vector<Vec3> out;
    double walked = 0.0;
    std::size_t edge = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double target = total * static_cast<double>(k) / static_cast<double>(count);
        while (true) {
            const Vec3 a = points[edge % n];
            const Vec3 b = points[(edge + 1) % n];
            const double len = (b - a).norm();
            if (walked + len >= target || edge + 1 >= n) {
                out.push_back(a + (target - walked) / len * (b - a));
                break;
            }
            walked += len;
            ++edge;
        }
    }
    return out;
}

/// Least-squares slope of log(error) against log(N); a positive return
/// value p means error ~ N^-p.
inline double observed_order(const std::vector<double>& ns, const std::vector<double>& errors)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double x = std::log(ns[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

} // namespace oracles
