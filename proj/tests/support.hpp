#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "curveflow/curve.hpp"

namespace testing_support {

using curveflow::DiscreteCurve;
using curveflow::Surface;
using curveflow::Vec3;

inline constexpr double kPi = std::numbers::pi;

inline std::shared_ptr<const Surface> share(Surface s)
{
    return std::make_shared<const Surface>(std::move(s));
}

inline DiscreteCurve plane_circle(std::size_t n, double radius, double phase = 0.0)
{
    std::vector<Vec3> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = phase + 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        p[i] = Vec3(radius * std::cos(t), radius * std::sin(t), 0.0);
    }
    return DiscreteCurve(share(Surface::plane()), p);
}

inline DiscreteCurve plane_ellipse(std::size_t n, double a, double b)
{
    std::vector<Vec3> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        p[i] = Vec3(a * std::cos(t), b * std::sin(t), 0.0);
    }
    return DiscreteCurve(share(Surface::plane()), p);
}

/// Great circle of the unit sphere in the plane spanned by orthonormal u, v.
inline DiscreteCurve great_circle(std::size_t n, const Vec3& u, const Vec3& v)
{
    std::vector<Vec3> p(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
        p[i] = std::cos(t) * u + std::sin(t) * v;
    }
    return DiscreteCurve(share(Surface::ellipsoid(1, 1, 1)), p);
}

/// Straight (1,0) line at height y on the unit flat torus.
inline DiscreteCurve torus_line(std::size_t n, double y = 0.5)
{
    std::vector<Vec3> p(n);
    for (std::size_t i = 0; i < n; ++i)
        p[i] = Vec3(static_cast<double>(i) / static_cast<double>(n), y, 0.0);
    return DiscreteCurve(share(Surface::flat_torus()), p);
}

/// Deterministic random points lying on `surface`, built from its own
/// parametrisation rather than from Surface::project.
inline std::vector<Vec3> random_surface_points(const Surface& surface, std::size_t count, unsigned seed = 7)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec3> points;
    points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double u = unit(rng);
        const double v = unit(rng);
        switch (surface.kind()) {
        case curveflow::SurfaceKind::Plane:
            points.emplace_back(20.0 * u - 10.0, 20.0 * v - 10.0, 0.0);
            break;
        case curveflow::SurfaceKind::FlatTorus:
            points.emplace_back(u, v, 0.0);
            break;
        case curveflow::SurfaceKind::Ellipsoid: {
            const auto& e = surface.ellipsoid_params();
            const double z = 2.0 * u - 1.0;
            const double s = std::sqrt(1.0 - z * z);
            const double phi = 2.0 * kPi * v;
            points.emplace_back(s * std::cos(phi) / std::sqrt(e.a), s * std::sin(phi) / std::sqrt(e.b),
                                z / std::sqrt(e.c));
            break;
        }
        case curveflow::SurfaceKind::SkewedTorus: {
            const auto& t = surface.skewed_torus_params();
            const double phi = 2.0 * kPi * u;
            const double psi = 2.0 * kPi * v;
            const double tube =
                (t.minor + t.skew * t.major * std::cos(phi)) / (1.0 - t.skew * std::cos(psi) * std::cos(phi));
            const double rho = t.major + tube * std::cos(psi);
            points.emplace_back(rho * std::cos(phi), rho * std::sin(phi), tube * std::sin(psi));
            break;
        }
        case curveflow::SurfaceKind::Revolution: {
            const double z = 10.0 * u - 5.0;
            const double r = surface.profile().value(z);
            const double phi = 2.0 * kPi * v;
            points.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
            break;
        }
        }
    }
    return points;
}

inline std::vector<std::shared_ptr<const Surface>> catalog_surfaces()
{
    return {share(Surface::plane()), share(Surface::flat_torus()), share(Surface::ellipsoid(4, 2, 1)),
            share(Surface::skewed_torus(2.0, 0.5, 0.1)), share(Surface::revolution(curveflow::stepped_profile_fn()))};
}

} // namespace testing_support
