#pragma once

#include <functional>
#include <string>
#include <variant>

#include <Eigen/Dense>
#include <json.hpp>

namespace curveflow {

using Json = nlohmann::ordered_json;

using Vec3 = Eigen::Vector3d;

/// Smooth monotone cutoff: -1 for s <= -1, +1 for s >= 1, odd, C-infinity.
/// Built from the smooth step g(s) = exp(-1/s) (s > 0), 0 otherwise.
double cutoff_beta(double s);
double cutoff_beta_derivative(double s);

/// Radius profile z -> f(z) > 0 of a surface of revolution x^2 + y^2 = f(z)^2.
struct ProfileFn {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

/// f(z) = w + sin(w) + 1 with w = beta(z) z. Critical points at z = 0 and
/// at the odd multiples of pi.
double stepped_profile(double z);
double stepped_profile_derivative(double z);
ProfileFn stepped_profile_fn();

enum class SurfaceKind { Plane, FlatTorus, Ellipsoid, SkewedTorus, Revolution };

struct ProjectionOptions {
    int max_iterations = 50;
    double tolerance = 1e-10;
};

/// One entry of the surface catalog.
///
/// Plane and FlatTorus are intrinsically flat and live in the z = 0 plane of
/// R^3; the remaining kinds are regular level sets F(p) = 0. Surfaces are
/// immutable values and safe to share across threads.
class Surface {
public:
    static Surface plane();
    static Surface flat_torus();
    /// a x^2 + b y^2 + c z^2 = 1, requires a, b, c > 0.
    static Surface ellipsoid(double a, double b, double c);
    /// (sqrt(x^2 + y^2) - R)^2 + z^2 = (r + a x)^2, requires R > r > 0 and
    /// r + a x > 0 on |x| <= R + r.
    static Surface skewed_torus(double major, double minor, double skew);
    /// x^2 + y^2 = f(z)^2.
    static Surface revolution(ProfileFn profile);

    SurfaceKind kind() const { return kind_; }
    bool is_flat() const { return kind_ == SurfaceKind::Plane || kind_ == SurfaceKind::FlatTorus; }
    bool is_implicit() const { return !is_flat(); }

    /// Level function F; identically zero for the flat kinds.
    double level(const Vec3& p) const;
    Vec3 gradient(const Vec3& p) const;

    /// Unit normal grad F / |grad F|. Flat kinds return e_z.
    /// Throws DegenerateGradient when |grad F| < 1e-12 or, for revolution
    /// surfaces, when x^2 + y^2 < 1e-8.
    Vec3 normal(const Vec3& p) const;

    /// Closest-point projection onto the surface. Identity on the plane,
    /// coordinate-wise wrap into [0,1)^2 on the flat torus.
    Vec3 project(const Vec3& p, const ProjectionOptions& options = {}) const;

    /// v - <v, n> n; drops the z component on the flat kinds.
    Vec3 tangent_project(const Vec3& p, const Vec3& v) const;

    /// Displacement from a to b. On the flat torus each coordinate is reduced
    /// to its shortest representative in [-1/2, 1/2).
    Vec3 difference(const Vec3& a, const Vec3& b) const;

    /// Catalog name as used in config documents ("plane", "ellipsoid", ...).
    std::string name() const;
    Json to_json() const;
    static Surface from_json(const Json& doc);

    struct EllipsoidParams {
        double a, b, c;
    };
    struct SkewedTorusParams {
        double major, minor, skew;
    };
    const EllipsoidParams& ellipsoid_params() const;
    const SkewedTorusParams& skewed_torus_params() const;
    const ProfileFn& profile() const;

private:
    using Params = std::variant<std::monostate, EllipsoidParams, SkewedTorusParams, ProfileFn>;

    Surface(SurfaceKind kind, Params params) : kind_(kind), params_(std::move(params)) {}

    void check_off_axis(const Vec3& p) const;

    SurfaceKind kind_;
    Params params_;
};

/// Reduce x to [0, 1).
double wrap_unit(double x);

} // namespace curveflow
