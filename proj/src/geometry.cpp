#include "curveflow/geometry.hpp"

#include <cmath>

#include "curveflow/errors.hpp"

namespace curveflow {

namespace {

constexpr double kMinGradient = 1e-12;
constexpr double kAxisExclusion = 1e-8;

// exp(-1/s) for s > 0, 0 otherwise.
double smooth_step(double s)
{
    return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

double smooth_step_derivative(double s)
{
    return s > 0.0 ? std::exp(-1.0 / s) / (s * s) : 0.0;
}

} // namespace

double cutoff_beta(double s)
{
    if (s >= 1.0)
        return 1.0;
    if (s <= -1.0)
        return -1.0;
    const double up = smooth_step(1.0 + s);
    const double down = smooth_step(1.0 - s);
    return (up - down) / (up + down);
}

double cutoff_beta_derivative(double s)
{
    if (s >= 1.0 || s <= -1.0)
        return 0.0;
    const double up = smooth_step(1.0 + s);
    const double down = smooth_step(1.0 - s);
    const double denom = up + down;
    return 2.0 * (smooth_step_derivative(1.0 + s) * down + up * smooth_step_derivative(1.0 - s)) /
           (denom * denom);
}

double stepped_profile(double z)
{
    const double w = cutoff_beta(z) * z;
    return w + std::sin(w) + 1.0;
}

double stepped_profile_derivative(double z)
{
    const double w = cutoff_beta(z) * z;
    const double dw = cutoff_beta_derivative(z) * z + cutoff_beta(z);
    return dw * (1.0 + std::cos(w));
}

ProfileFn stepped_profile_fn()
{
    return ProfileFn{"stepped", &stepped_profile, &stepped_profile_derivative};
}

double wrap_unit(double x)
{
    double r = x - std::floor(x);
    // x slightly below an integer can round up to exactly 1.
    if (r >= 1.0)
        r = 0.0;
    return r;
}

Surface Surface::plane()
{
    return Surface(SurfaceKind::Plane, std::monostate{});
}

Surface Surface::flat_torus()
{
    return Surface(SurfaceKind::FlatTorus, std::monostate{});
}

Surface Surface::ellipsoid(double a, double b, double c)
{
    if (!(a > 0.0 && b > 0.0 && c > 0.0))
        throw ConfigError("ellipsoid coefficients must be positive");
    return Surface(SurfaceKind::Ellipsoid, EllipsoidParams{a, b, c});
}

Surface Surface::skewed_torus(double major, double minor, double skew)
{
    if (!(major > minor && minor > 0.0))
        throw ConfigError("skewed torus requires R > r > 0");
    if (!(minor - std::abs(skew) * (major + minor) > 0.0))
        throw ConfigError("skewed torus tube radius r + a x must stay positive on |x| <= R + r");
    return Surface(SurfaceKind::SkewedTorus, SkewedTorusParams{major, minor, skew});
}

Surface Surface::revolution(ProfileFn profile)
{
    if (!profile.value || !profile.derivative)
        throw ConfigError("revolution profile needs a value and a derivative");
    return Surface(SurfaceKind::Revolution, std::move(profile));
}

const Surface::EllipsoidParams& Surface::ellipsoid_params() const
{
    return std::get<EllipsoidParams>(params_);
}

const Surface::SkewedTorusParams& Surface::skewed_torus_params() const
{
    return std::get<SkewedTorusParams>(params_);
}

const ProfileFn& Surface::profile() const
{
    return std::get<ProfileFn>(params_);
}

void Surface::check_off_axis(const Vec3& p) const
{
    if (p.x() * p.x() + p.y() * p.y() < kAxisExclusion)
        throw DegenerateGradient("point lies on the symmetry axis");
}

double Surface::level(const Vec3& p) const
{
    switch (kind_) {
    case SurfaceKind::Plane:
    case SurfaceKind::FlatTorus:
        return 0.0;
    case SurfaceKind::Ellipsoid: {
        const auto& e = ellipsoid_params();
        return e.a * p.x() * p.x() + e.b * p.y() * p.y() + e.c * p.z() * p.z() - 1.0;
    }
    case SurfaceKind::SkewedTorus: {
        const auto& t = skewed_torus_params();
        const double rho = std::sqrt(p.x() * p.x() + p.y() * p.y()) - t.major;
        const double tube = t.minor + t.skew * p.x();
        return rho * rho + p.z() * p.z() - tube * tube;
    }
    case SurfaceKind::Revolution: {
        const double f = profile().value(p.z());
        return p.x() * p.x() + p.y() * p.y() - f * f;
    }
    }
    return 0.0;
}

Vec3 Surface::gradient(const Vec3& p) const
{
    switch (kind_) {
    case SurfaceKind::Plane:
    case SurfaceKind::FlatTorus:
        return Vec3::UnitZ();
    case SurfaceKind::Ellipsoid: {
        const auto& e = ellipsoid_params();
        return {2.0 * e.a * p.x(), 2.0 * e.b * p.y(), 2.0 * e.c * p.z()};
    }
    case SurfaceKind::SkewedTorus: {
        const auto& t = skewed_torus_params();
        const double radial = std::sqrt(p.x() * p.x() + p.y() * p.y());
        if (radial < kMinGradient)
            throw DegenerateGradient("point lies on the torus axis");
        const double scale = 2.0 * (radial - t.major) / radial;
        const double tube = t.minor + t.skew * p.x();
        return {scale * p.x() - 2.0 * t.skew * tube, scale * p.y(), 2.0 * p.z()};
    }
    case SurfaceKind::Revolution: {
        check_off_axis(p);
        const auto& f = profile();
        return {2.0 * p.x(), 2.0 * p.y(), -2.0 * f.value(p.z()) * f.derivative(p.z())};
    }
    }
    return Vec3::UnitZ();
}

Vec3 Surface::normal(const Vec3& p) const
{
    if (is_flat())
        return Vec3::UnitZ();
    const Vec3 g = gradient(p);
    const double norm = g.norm();
    if (norm < kMinGradient)
        throw DegenerateGradient("level-function gradient vanishes");
    return g / norm;
}

Vec3 Surface::project(const Vec3& p, const ProjectionOptions& options) const
{
    if (kind_ == SurfaceKind::Plane)
        return p;
    if (kind_ == SurfaceKind::FlatTorus)
        return {wrap_unit(p.x()), wrap_unit(p.y()), 0.0};

    // Closest-point iteration: q = p - lambda * grad F(q). Each pass freezes
    // the direction at the current iterate and takes one damped Newton step
    // in lambda along the line p - lambda * g.
    double lambda = 0.0;
    Vec3 q = p;
    double residual = level(q);
    for (int it = 0; it < options.max_iterations; ++it) {
        const Vec3 direction = gradient(q);
        if (direction.norm() < kMinGradient)
            throw DegenerateGradient("level-function gradient vanishes during projection");

        const Vec3 on_line = p - lambda * direction;
        const double value = level(on_line);
        const double slope = -gradient(on_line).dot(direction);
        if (std::abs(slope) < kMinGradient * kMinGradient)
            throw ProjectionDiverged("projection line is tangent to the level set");

        double step = -value / slope;
        Vec3 next = p - (lambda + step) * direction;
        double next_residual = level(next);
        for (int halving = 0; halving < 30 && std::abs(next_residual) > std::abs(value) &&
                              std::abs(next_residual) > options.tolerance;
             ++halving) {
            step *= 0.5;
            next = p - (lambda + step) * direction;
            next_residual = level(next);
        }

        const double moved = (next - q).norm();
        lambda += step;
        q = next;
        residual = next_residual;
        if (std::abs(residual) <= options.tolerance && moved <= 1e-10 * (1.0 + q.norm()))
            return q;
    }
    if (std::abs(residual) <= options.tolerance)
        return q;
    throw ProjectionDiverged("projection did not reach |F| <= tolerance (step size too large?)");
}

Vec3 Surface::tangent_project(const Vec3& p, const Vec3& v) const
{
    if (is_flat())
        return Vec3(v.x(), v.y(), 0.0);
    const Vec3 n = normal(p);
    return v - v.dot(n) * n;
}

Vec3 Surface::difference(const Vec3& a, const Vec3& b) const
{
    Vec3 d = b - a;
    if (kind_ == SurfaceKind::FlatTorus) {
        d.x() -= std::floor(d.x() + 0.5);
        d.y() -= std::floor(d.y() + 0.5);
    }
    return d;
}

std::string Surface::name() const
{
    switch (kind_) {
    case SurfaceKind::Plane:
        return "plane";
    case SurfaceKind::FlatTorus:
        return "flat_torus";
    case SurfaceKind::Ellipsoid:
        return "ellipsoid";
    case SurfaceKind::SkewedTorus:
        return "skewed_torus";
    case SurfaceKind::Revolution:
        return "revolution";
    }
    return "unknown";
}

Json Surface::to_json() const
{
    Json doc;
    doc["surface"] = name();
    switch (kind_) {
    case SurfaceKind::Ellipsoid: {
        const auto& e = ellipsoid_params();
        doc["a"] = e.a;
        doc["b"] = e.b;
        doc["c"] = e.c;
        break;
    }
    case SurfaceKind::SkewedTorus: {
        const auto& t = skewed_torus_params();
        doc["R"] = t.major;
        doc["r"] = t.minor;
        doc["a"] = t.skew;
        break;
    }
    case SurfaceKind::Revolution:
        doc["profile"] = profile().name;
        break;
    default:
        break;
    }
    return doc;
}

Surface Surface::from_json(const Json& doc)
{
    if (!doc.is_object() || !doc.contains("surface") || !doc["surface"].is_string())
        throw ConfigError("surface document needs a string \"surface\" tag");
    const auto tag = doc["surface"].get<std::string>();
    auto number = [&](const char* key) {
        if (!doc.contains(key) || !doc[key].is_number())
            throw ConfigError("surface \"" + tag + "\" needs numeric parameter \"" + key + "\"");
        return doc[key].get<double>();
    };
    if (tag == "plane")
        return plane();
    if (tag == "flat_torus")
        return flat_torus();
    if (tag == "ellipsoid")
        return ellipsoid(number("a"), number("b"), number("c"));
    if (tag == "skewed_torus")
        return skewed_torus(number("R"), number("r"), number("a"));
    if (tag == "revolution") {
        const auto profile = doc.value("profile", std::string("stepped"));
        if (profile != "stepped")
            throw ConfigError("unknown revolution profile \"" + profile + "\"");
        return revolution(stepped_profile_fn());
    }
    throw ConfigError("unknown surface \"" + tag + "\"");
}

} // namespace curveflow
