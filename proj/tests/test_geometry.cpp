#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "curveflow/errors.hpp"
#include "support.hpp"

using namespace curveflow;
using testing_support::kPi;

namespace {

bool near(const Vec3& a, const Vec3& b, double tol)
{
    return (a - b).norm() <= tol;
}

// Independent root finder for the axis-point projection example.
double newton_root(double (*f)(double), double (*df)(double), double x)
{
    for (int i = 0; i < 100; ++i) {
        const double step = f(x) / df(x);
        x -= step;
        if (std::abs(step) < 1e-15)
            break;
    }
    return x;
}

} // namespace

TEST_CASE("normals of catalog surfaces at reference points")
{
    CHECK(near(Surface::ellipsoid(1, 1, 1).normal(Vec3(1, 0, 0)), Vec3(1, 0, 0), 1e-15));
    CHECK(near(Surface::ellipsoid(4, 1, 1).normal(Vec3(0.5, 0, 0)), Vec3(1, 0, 0), 1e-15));
    const auto rev = Surface::revolution(stepped_profile_fn());
    CHECK(near(rev.normal(Vec3(1, 0, 0)), Vec3(1, 0, 0), 1e-15));
    CHECK(near(Surface::plane().normal(Vec3(3, -2, 0)), Vec3(0, 0, 1), 0.0));
}

TEST_CASE("projection examples")
{
    CHECK(near(Surface::ellipsoid(1, 1, 1).project(Vec3(2, 0, 0)), Vec3(1, 0, 0), 1e-12));
    CHECK(near(Surface::flat_torus().project(Vec3(1.25, -0.5, 0)), Vec3(0.25, 0.5, 0), 1e-15));
    CHECK(near(Surface::plane().project(Vec3(1.5, -7, 0)), Vec3(1.5, -7, 0), 0.0));

    const double x = newton_root([](double t) { return 4 * t * t - 1; }, [](double t) { return 8 * t; }, 1.0);
    const Vec3 q = Surface::ellipsoid(4, 1, 1).project(Vec3(1, 0, 0));
    CHECK(q.x() == doctest::Approx(x).epsilon(1e-12));
    CHECK(std::abs(q.y()) < 1e-15);
    CHECK(std::abs(q.z()) < 1e-15);
}

TEST_CASE("tangent projection examples")
{
    CHECK(near(Surface::ellipsoid(1, 1, 1).tangent_project(Vec3(1, 0, 0), Vec3(3, 2, 0)), Vec3(0, 2, 0), 1e-15));
    CHECK(near(Surface::plane().tangent_project(Vec3(4, 1, 0), Vec3(0.3, -2, 0)), Vec3(0.3, -2, 0), 0.0));
    const auto rev = Surface::revolution(stepped_profile_fn());
    CHECK(near(rev.tangent_project(Vec3(1, 0, 0), Vec3(0, 0, 1)), Vec3(0, 0, 1), 1e-15));
}

TEST_CASE("cutoff beta")
{
    CHECK(cutoff_beta(-2.0) == -1.0);
    CHECK(cutoff_beta(-1.0) == -1.0);
    CHECK(cutoff_beta(1.0) == 1.0);
    CHECK(cutoff_beta(0.0) == 0.0);
    for (double s = -1.5; s <= 1.5; s += 0.0137)
        CHECK(std::abs(cutoff_beta(-s) + cutoff_beta(s)) <= 1e-14);

    SUBCASE("monotone")
    {
        double previous = -1.0;
        for (double s = -1.0; s <= 1.0; s += 1e-3) {
            CHECK(cutoff_beta(s) >= previous);
            previous = cutoff_beta(s);
        }
    }
    SUBCASE("derivative matches central differences")
    {
        const double h = 1e-6;
        for (double s = -0.95; s < 0.95; s += 0.05) {
            const double fd = (cutoff_beta(s + h) - cutoff_beta(s - h)) / (2 * h);
            CHECK(cutoff_beta_derivative(s) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("stepped profile")
{
    CHECK(stepped_profile(0.0) == 1.0);
    CHECK(stepped_profile(kPi) == doctest::Approx(kPi + 1.0 + std::sin(kPi)).epsilon(1e-15));
    for (double z : {0.0, kPi, 3 * kPi, -kPi})
        CHECK(std::abs(stepped_profile_derivative(z)) < 1e-10);
    // Off the critical set the latitude circle is not a geodesic.
    CHECK(std::abs(stepped_profile_derivative(0.3)) > 1e-2);
    // Above the cutoff region f(z) = z + sin z + 1.
    for (double z : {1.0, 2.5, 7.0})
        CHECK(stepped_profile(z) == doctest::Approx(z + std::sin(z) + 1.0).epsilon(1e-14));
    const double h = 1e-6;
    for (double z = -4.0; z <= 4.0; z += 0.1) {
        const double fd = (stepped_profile(z + h) - stepped_profile(z - h)) / (2 * h);
        CHECK(stepped_profile_derivative(z) == doctest::Approx(fd).epsilon(1e-6));
        CHECK(stepped_profile(z) >= 1.0);
    }
}

TEST_CASE("normals are unit length on every catalog surface")
{
    for (const auto& surface : testing_support::catalog_surfaces()) {
        CAPTURE(surface->name());
        double worst = 0.0;
        for (const auto& p : testing_support::random_surface_points(*surface, 10000))
            worst = std::max(worst, std::abs(surface->normal(p).norm() - 1.0));
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("projection is a fixed point and lands on the closest point")
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> offset(0.0, 0.02);
    for (const auto& surface : testing_support::catalog_surfaces()) {
        CAPTURE(surface->name());
        for (const auto& p : testing_support::random_surface_points(*surface, 2000, 3)) {
            const Vec3 shifted = p + Vec3(offset(rng), offset(rng), surface->is_flat() ? 0.0 : offset(rng));
            const Vec3 q = surface->project(shifted);
            CHECK(near(surface->project(q), q, 1e-10));
            if (surface->is_implicit()) {
                CHECK(std::abs(surface->level(q)) <= 1e-10);
                // Closest point: the offset is normal to the surface.
                const Vec3 d = shifted - q;
                CHECK(d.cross(surface->normal(q)).norm() <= 1e-8 * (1.0 + d.norm()));
            }
        }
    }
}

TEST_CASE("tangent projection is idempotent and orthogonal to the normal")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coord(-3.0, 3.0);
    for (const auto& surface : testing_support::catalog_surfaces()) {
        CAPTURE(surface->name());
        for (const auto& p : testing_support::random_surface_points(*surface, 2000, 9)) {
            const Vec3 v(coord(rng), coord(rng), coord(rng));
            const Vec3 t = surface->tangent_project(p, v);
            CHECK((surface->tangent_project(p, t) - t).norm() < 1e-12 * (1.0 + v.norm()));
            CHECK(std::abs(t.dot(surface->normal(p))) < 1e-12 * (1.0 + v.norm()));
        }
    }
}

TEST_CASE("flat torus differences use the shortest representative")
{
    const auto torus = Surface::flat_torus();
    CHECK(near(torus.difference(Vec3(0.9, 0.1, 0), Vec3(0.05, 0.95, 0)), Vec3(0.15, -0.15, 0), 1e-15));
    CHECK(near(torus.difference(Vec3(0.2, 0.2, 0), Vec3(0.4, 0.6, 0)), Vec3(0.2, 0.4, 0), 1e-15));
    CHECK(wrap_unit(-1e-20) < 1.0);
    CHECK(wrap_unit(3.75) == 0.75);
}

TEST_CASE("degenerate inputs")
{
    const auto rev = Surface::revolution(stepped_profile_fn());
    CHECK_THROWS_AS(rev.normal(Vec3(0, 0, 0.5)), DegenerateGradient);
    CHECK_THROWS_AS(Surface::ellipsoid(1, 1, 1).normal(Vec3(0, 0, 0)), DegenerateGradient);
    CHECK_THROWS_AS(Surface::ellipsoid(1, -1, 1), ConfigError);
    CHECK_THROWS_AS(Surface::skewed_torus(0.5, 2.0, 0.1), ConfigError);
    CHECK_THROWS_AS(Surface::skewed_torus(2.0, 0.5, 0.5), ConfigError);
}

TEST_CASE("surface documents round-trip")
{
    for (const auto& surface : testing_support::catalog_surfaces()) {
        const Json doc = surface->to_json();
        const Surface back = Surface::from_json(doc);
        CHECK(back.kind() == surface->kind());
        CHECK(back.to_json() == doc);
    }
    const Json ellipsoid = Json::parse(R"({"surface": "ellipsoid", "a": 4.0, "b": 2.0, "c": 1.0})");
    CHECK(Surface::from_json(ellipsoid).ellipsoid_params().b == 2.0);
    CHECK_THROWS_AS(Surface::from_json(Json::parse(R"({"surface": "klein_bottle"})")), ConfigError);
    CHECK_THROWS_AS(Surface::from_json(Json::parse(R"({"surface": "ellipsoid", "a": 4.0})")), ConfigError);
    CHECK_THROWS_AS(Surface::from_json(Json::parse(R"([1, 2])")), ConfigError);
}
