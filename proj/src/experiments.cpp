#include "curveflow/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <map>
#include <numbers>

#include <Eigen/Geometry>

#include "curveflow/io.hpp"

namespace curveflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec3 axis_vector(const std::string& axis)
{
    if (axis == "x")
        return Vec3::UnitX();
    if (axis == "y")
        return Vec3::UnitY();
    if (axis == "z")
        return Vec3::UnitZ();
    throw ConfigError("axis must be \"x\", \"y\" or \"z\", got \"" + axis + "\"");
}

void require_surface(const Scenario& scenario, SurfaceKind kind)
{
    if (scenario.surface->kind() != kind)
        throw ConfigError("generator \"" + scenario.generator.kind() + "\" cannot run on surface \"" +
                          scenario.surface->name() + "\"");
}

using Parametric = std::function<Vec3(double)>;

// Samples a closed parametric curve (period 1) at n parameters equally spaced
// in arclength, measured on a fine chord table. Uniform spacing matters: the
// first resampling pass would otherwise move vertices by O(h) and can
// lengthen the polygon.
std::vector<Vec3> sample_by_arclength(const Surface& surface, const Parametric& curve, std::size_t n)
{
    const std::size_t fine = 64 * n;
    std::vector<double> cumulative(fine + 1, 0.0);
    Vec3 previous = curve(0.0);
    for (std::size_t j = 1; j <= fine; ++j) {
        const Vec3 current = curve(static_cast<double>(j) / static_cast<double>(fine));
        cumulative[j] = cumulative[j - 1] + surface.difference(previous, current).norm();
        previous = current;
    }
    const double total = cumulative.back();
    std::vector<Vec3> points(n);
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double target = total * static_cast<double>(i) / static_cast<double>(n);
        while (cumulative[j + 1] < target)
            ++j;
        const double span = cumulative[j + 1] - cumulative[j];
        const double frac = span > 0.0 ? (target - cumulative[j]) / span : 0.0;
        points[i] = curve((static_cast<double>(j) + frac) / static_cast<double>(fine));
    }
    return points;
}

template <typename Radius>
Parametric polar_curve(Radius radius)
{
    return [radius](double s) {
        const double theta = kTwoPi * s;
        const double r = radius(theta);
        return Vec3(r * std::cos(theta), r * std::sin(theta), 0.0);
    };
}

const std::map<std::string, std::vector<std::string>>& generator_parameters()
{
    static const std::map<std::string, std::vector<std::string>> table = {
        {"circle", {"radius", "center_x", "center_y"}},
        {"star", {"radius", "amplitude", "lobes"}},
        {"blob", {"amplitude"}},
        {"ellipse", {"semi_major", "semi_minor"}},
        {"ellipsoid_section", {"plane", "axis", "tilt", "roll"}},
        {"ellipsoid_slice", {"height"}},
        {"torus_loop", {"k", "l", "phi0", "psi0", "amplitude", "frequency"}},
        {"flat_torus_loop", {"p", "q", "x0", "y0", "amplitude", "frequency"}},
        {"revolution_circle", {"height", "amplitude", "frequency"}},
    };
    return table;
}

Parametric parametric_curve(const Scenario& scenario)
{
    const GeneratorSpec& gen = scenario.generator;
    const std::string kind = gen.kind();
    const auto entry = generator_parameters().find(kind);
    if (entry == generator_parameters().end())
        throw ConfigError("unknown generator \"" + kind + "\"");
    for (const auto& [key, value] : gen.params.items()) {
        if (key != "kind" && std::find(entry->second.begin(), entry->second.end(), key) == entry->second.end())
            throw ConfigError("generator \"" + kind + "\" has no parameter \"" + key + "\"");
    }

    if (kind == "circle") {
        require_surface(scenario, SurfaceKind::Plane);
        const double radius = gen.number("radius", 1.0);
        const Vec3 center(gen.number("center_x", 0.0), gen.number("center_y", 0.0), 0.0);
        const auto circle = polar_curve([radius](double) { return radius; });
        return [=](double s) { return Vec3(center + circle(s)); };
    }
    if (kind == "star") {
        require_surface(scenario, SurfaceKind::Plane);
        const double radius = gen.number("radius", 1.0);
        const double amplitude = gen.number("amplitude", 0.3);
        const double lobes = gen.number("lobes", 5.0);
        return polar_curve([=](double t) { return radius * (1.0 + amplitude * std::sin(lobes * t)); });
    }
    if (kind == "blob") {
        require_surface(scenario, SurfaceKind::Plane);
        const double amplitude = gen.number("amplitude", 0.3);
        return polar_curve(
            [=](double t) { return 1.0 + amplitude * std::cos(3.0 * t) + 0.5 * amplitude * std::sin(2.0 * t); });
    }
    if (kind == "ellipse") {
        require_surface(scenario, SurfaceKind::Plane);
        const double a = gen.number("semi_major", 1.0);
        const double b = gen.number("semi_minor", 0.5);
        return [=](double s) { return Vec3(a * std::cos(kTwoPi * s), b * std::sin(kTwoPi * s), 0.0); };
    }
    if (kind == "ellipsoid_section") {
        // Central section of the ellipsoid by a principal plane rotated by
        // `tilt` about `axis`, then by `roll` about x; radial scaling
        // d / sqrt(d^T A d) lands exactly on the surface.
        require_surface(scenario, SurfaceKind::Ellipsoid);
        const auto e = scenario.surface->ellipsoid_params();
        const std::string plane = gen.text("plane", "x");
        const Vec3 normal = axis_vector(plane);
        const Vec3 first = plane == "x" ? Vec3::UnitY() : plane == "y" ? Vec3::UnitZ() : Vec3::UnitX();
        const Vec3 second = normal.cross(first);
        const Eigen::Matrix3d rotation =
            (Eigen::AngleAxisd(gen.number("roll", 0.0), Vec3::UnitX()) *
             Eigen::AngleAxisd(gen.number("tilt", 0.0), axis_vector(gen.text("axis", "y"))))
                .toRotationMatrix();
        const Vec3 u = rotation * first;
        const Vec3 v = rotation * second;
        return [=](double s) {
            const Vec3 d = std::cos(kTwoPi * s) * u + std::sin(kTwoPi * s) * v;
            const double q = e.a * d.x() * d.x() + e.b * d.y() * d.y() + e.c * d.z() * d.z();
            return Vec3(d / std::sqrt(q));
        };
    }
    if (kind == "ellipsoid_slice") {
        require_surface(scenario, SurfaceKind::Ellipsoid);
        const auto e = scenario.surface->ellipsoid_params();
        const double z = gen.number("height", 0.0);
        const double rest = 1.0 - e.c * z * z;
        if (!(rest > 0.0))
            throw ConfigError("ellipsoid_slice height misses the ellipsoid");
        const double ax = std::sqrt(rest / e.a);
        const double ay = std::sqrt(rest / e.b);
        return [=](double s) { return Vec3(ax * std::cos(kTwoPi * s), ay * std::sin(kTwoPi * s), z); };
    }
    if (kind == "torus_loop") {
        // (phi, psi) = angle about the z axis, angle around the tube. The tube
        // radius s solves s = r + a (R + s cos psi) cos phi exactly.
        require_surface(scenario, SurfaceKind::SkewedTorus);
        const auto t = scenario.surface->skewed_torus_params();
        const double k = gen.number("k", 1.0);
        const double l = gen.number("l", 0.0);
        const double norm = std::hypot(k, l);
        if (norm == 0.0)
            throw ConfigError("torus_loop needs (k, l) != (0, 0)");
        const double phi0 = gen.number("phi0", 0.0);
        const double psi0 = gen.number("psi0", 0.0);
        const double amplitude = gen.number("amplitude", 0.0);
        const double frequency = gen.number("frequency", 2.0);
        return [=](double s) {
            const double wiggle = amplitude * std::sin(kTwoPi * frequency * s) / norm;
            const double psi = psi0 + kTwoPi * k * s - l * wiggle;
            const double phi = phi0 + kTwoPi * l * s + k * wiggle;
            const double tube =
                (t.minor + t.skew * t.major * std::cos(phi)) / (1.0 - t.skew * std::cos(psi) * std::cos(phi));
            const double rho = t.major + tube * std::cos(psi);
            return Vec3(rho * std::cos(phi), rho * std::sin(phi), tube * std::sin(psi));
        };
    }
    if (kind == "flat_torus_loop") {
        require_surface(scenario, SurfaceKind::FlatTorus);
        const double p = gen.number("p", 1.0);
        const double q = gen.number("q", 0.0);
        const double norm = std::hypot(p, q);
        if (norm == 0.0)
            throw ConfigError("flat_torus_loop needs (p, q) != (0, 0)");
        const double x0 = gen.number("x0", 0.0);
        const double y0 = gen.number("y0", 0.5);
        const double amplitude = gen.number("amplitude", 0.05);
        const double frequency = gen.number("frequency", 1.0);
        return [=](double s) {
            const double wiggle = amplitude * std::sin(kTwoPi * frequency * s) / norm;
            return Vec3(wrap_unit(x0 + p * s - q * wiggle), wrap_unit(y0 + q * s + p * wiggle), 0.0);
        };
    }
    // revolution_circle
    require_surface(scenario, SurfaceKind::Revolution);
    const ProfileFn profile = scenario.surface->profile();
    const double height = gen.number("height", 0.0);
    const double amplitude = gen.number("amplitude", 0.1);
    const double frequency = gen.number("frequency", 2.0);
    return [=](double s) {
        const double theta = kTwoPi * s;
        const double z = height + amplitude * std::sin(frequency * theta);
        const double r = profile.value(z);
        return Vec3(r * std::cos(theta), r * std::sin(theta), z);
    };
}

Json plateau_json(const std::vector<PlateauEvent>& plateaus)
{
    Json list = Json::array();
    for (const auto& p : plateaus) {
        Json entry;
        entry["start"] = p.start_step;
        entry["end"] = p.end_step;
        entry["mean_length"] = p.mean_length;
        list.push_back(std::move(entry));
    }
    return list;
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

} // namespace

std::string GeneratorSpec::kind() const
{
    if (!params.is_object() || !params.contains("kind") || !params["kind"].is_string())
        throw ConfigError("generator needs a string \"kind\"");
    return params["kind"].get<std::string>();
}

double GeneratorSpec::number(const char* key, double fallback) const
{
    if (!params.contains(key))
        return fallback;
    if (!params[key].is_number())
        throw ConfigError(std::string("generator parameter \"") + key + "\" must be numeric");
    return params[key].get<double>();
}

std::string GeneratorSpec::text(const char* key, const std::string& fallback) const
{
    if (!params.contains(key))
        return fallback;
    if (!params[key].is_string())
        throw ConfigError(std::string("generator parameter \"") + key + "\" must be a string");
    return params[key].get<std::string>();
}

std::string to_string(SelfCheck check)
{
    switch (check) {
    case SelfCheck::Pass:
        return "pass";
    case SelfCheck::Fail:
        return "fail";
    case SelfCheck::None:
        return "none";
    }
    return "none";
}

Json Scenario::to_json() const
{
    Json doc;
    doc["scenario"] = name;
    doc["description"] = description;
    doc["surface"] = surface->to_json();
    doc["generator"] = generator.params;
    doc["config"] = config.to_json();
    doc["expected"] = expected ? Json(to_string(*expected)) : Json(nullptr);
    doc["plateau"] = Json{{"eps_k2", plateau_eps}, {"min_duration", plateau_min_duration}};
    return doc;
}

Scenario Scenario::from_json(const Json& doc)
{
    if (!doc.is_object())
        throw ConfigError("scenario document must be an object");
    static const std::vector<std::string> known = {"scenario", "description", "surface", "generator",
                                                   "config",   "expected",    "plateau"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown scenario key \"" + key + "\"");
    }
    Scenario scenario;
    scenario.name = doc.value("scenario", std::string("custom"));
    scenario.description = doc.value("description", std::string());
    if (!doc.contains("surface"))
        throw ConfigError("scenario needs a \"surface\" document");
    scenario.surface = std::make_shared<const Surface>(Surface::from_json(doc["surface"]));
    if (!doc.contains("generator"))
        throw ConfigError("scenario needs a \"generator\" document");
    scenario.generator.params = doc["generator"];
    scenario.generator.kind();
    if (doc.contains("config"))
        scenario.config = FlowConfig::from_json(doc["config"]);
    if (doc.contains("expected") && !doc["expected"].is_null()) {
        if (!doc["expected"].is_string())
            throw ConfigError("\"expected\" must be a classification name or null");
        scenario.expected = classification_from_string(doc["expected"].get<std::string>());
    }
    if (doc.contains("plateau")) {
        const auto& plateau = doc["plateau"];
        if (!plateau.is_object())
            throw ConfigError("\"plateau\" must be an object");
        for (const auto& [key, value] : plateau.items()) {
            if (key == "eps_k2" && value.is_number())
                scenario.plateau_eps = value.get<double>();
            else if (key == "min_duration" && value.is_number_integer())
                scenario.plateau_min_duration = value.get<long>();
            else
                throw ConfigError("bad plateau key \"" + key + "\"");
        }
    }
    return scenario;
}

namespace {

Scenario make(std::string name, std::string description, Surface surface, Json generator,
              std::optional<Classification> expected, Json overrides)
{
    Scenario s;
    s.name = std::move(name);
    s.description = std::move(description);
    s.surface = std::make_shared<const Surface>(std::move(surface));
    s.generator.params = std::move(generator);
    Json config = FlowConfig{}.to_json();
    for (const auto& [key, value] : overrides.items())
        config[key] = value;
    s.config = FlowConfig::from_json(config);
    s.expected = expected;
    return s;
}

std::vector<Scenario> build_catalog()
{
    using C = Classification;
    const double pi = std::numbers::pi;
    std::vector<Scenario> list;

    list.push_back(make("plane_circle", "unit circle shrinking to a point", Surface::plane(),
                        {{"kind", "circle"}, {"radius", 1.0}}, C::ShrunkToPoint,
                        {{"N", 256}, {"tol_point", 0.05}, {"snapshot_every", 4000}}));
    list.push_back(make("plane_star", "five-lobed star r = 1 + 0.3 sin 5t becoming round and shrinking",
                        Surface::plane(), {{"kind", "star"}, {"amplitude", 0.3}, {"lobes", 5}}, C::ShrunkToPoint,
                        {{"N", 256}, {"tol_point", 0.05}, {"snapshot_every", 4000}}));
    list.push_back(make("plane_blob", "non-convex blob turning convex before shrinking", Surface::plane(),
                        {{"kind", "blob"}, {"amplitude", 0.3}}, C::ShrunkToPoint,
                        {{"N", 256}, {"tol_point", 0.05}, {"snapshot_every", 4000}}));
    list.push_back(make("plane_ellipse", "2:1 ellipse shrinking to a round point", Surface::plane(),
                        {{"kind", "ellipse"}, {"semi_major", 1.0}, {"semi_minor", 0.5}}, C::ShrunkToPoint,
                        {{"N", 256}, {"tol_point", 0.05}, {"snapshot_every", 2000}}));
    list.push_back(make("plane_ellipse_backward", "2:1 ellipse in backward time: the flow turns chaotic",
                        Surface::plane(), {{"kind", "ellipse"}, {"semi_major", 1.0}, {"semi_minor", 0.5}},
                        std::nullopt, {{"N", 256}, {"direction", "backward"}, {"max_steps", 80}, {"snapshot_every", 5}}));
    list.push_back(make("sphere_great_circle", "tilted great circle on the unit sphere: a critical point",
                        Surface::ellipsoid(1, 1, 1), {{"kind", "ellipsoid_section"}, {"plane", "x"}, {"axis", "y"}, {"tilt", 0.4}},
                        C::ConvergedToGeodesic, {{"N", 128}}));
    list.push_back(make("ellipsoid_longest_to_shortest",
                        "bisecting curve near the longest principal ellipse flowing to the shortest one",
                        Surface::ellipsoid(4, 2, 1),
                        {{"kind", "ellipsoid_section"}, {"plane", "x"}, {"axis", "y"}, {"tilt", 0.3}},
                        C::ConvergedToGeodesic, {{"N", 256}, {"snapshot_every", 10000}, {"max_steps", 400000}}));
    // The middle ellipse is a saddle: the flow lingers there, then the small
    // roll carries it down to the shortest ellipse. Near the saddle int k^2
    // only dips to ~1.5e-3, hence the larger plateau threshold.
    list.push_back(make("ellipsoid_broken_flow_line",
                        "curve near the longest principal ellipse passing the middle one on its way to the shortest",
                        Surface::ellipsoid(4, 2, 1),
                        {{"kind", "ellipsoid_section"}, {"plane", "x"}, {"axis", "z"}, {"tilt", 0.3}, {"roll", 1e-6}},
                        C::ConvergedToGeodesic, {{"N", 256}, {"snapshot_every", 10000}, {"max_steps", 600000}}));
    list.back().plateau_eps = 3e-3;
    list.push_back(make("ellipsoid_slice_shrink", "curve above the shortest geodesic shrinking to the top",
                        Surface::ellipsoid(4, 2, 1), {{"kind", "ellipsoid_slice"}, {"height", 0.3}}, C::ShrunkToPoint,
                        {{"N", 128}, {"tol_point", 0.05}, {"snapshot_every", 4000}}));
    list.push_back(make("skewed_torus_meridian", "wiggled tube loop sliding to the thinnest meridian geodesic",
                        Surface::skewed_torus(2.0, 0.5, 0.1),
                        {{"kind", "torus_loop"}, {"k", 1}, {"l", 0}, {"phi0", 2.75}, {"amplitude", 0.05}, {"frequency", 2}},
                        C::ConvergedToGeodesic, {{"N", 64}, {"snapshot_every", 20000}, {"max_steps", 600000}}));
    list.push_back(make("skewed_torus_longitude", "wiggled loop around the axis flowing to the inner equator",
                        Surface::skewed_torus(2.0, 0.5, 0.1),
                        {{"kind", "torus_loop"}, {"k", 0}, {"l", 1}, {"psi0", 1.2}, {"amplitude", 0.1}, {"frequency", 3}},
                        C::ConvergedToGeodesic, {{"N", 128}, {"snapshot_every", 1000}}));
    list.push_back(make("flat_torus_10_wiggle", "(1,0) loop with a sinusoidal wiggle straightening out",
                        Surface::flat_torus(),
                        {{"kind", "flat_torus_loop"}, {"p", 1}, {"q", 0}, {"amplitude", 0.05}, {"frequency", 1}},
                        C::ConvergedToGeodesic, {{"N", 128}, {"snapshot_every", 2000}}));
    list.push_back(make("flat_torus_11_wiggle", "(1,1) loop with a wiggle converging to a diagonal line",
                        Surface::flat_torus(),
                        {{"kind", "flat_torus_loop"}, {"p", 1}, {"q", 1}, {"amplitude", 0.05}, {"frequency", 2}},
                        C::ConvergedToGeodesic, {{"N", 128}, {"snapshot_every", 2000}}));
    list.push_back(make("revolution_waist_wobble", "wobbled waist circle converging to the shortest geodesic",
                        Surface::revolution(stepped_profile_fn()),
                        {{"kind", "revolution_circle"}, {"height", 0.0}, {"amplitude", 0.1}, {"frequency", 2}},
                        C::ConvergedToGeodesic, {{"N", 256}, {"snapshot_every", 250}}));
    list.push_back(make("revolution_upper_wobble", "wobbled circle above z = pi settling onto the z = pi geodesic",
                        Surface::revolution(stepped_profile_fn()),
                        {{"kind", "revolution_circle"}, {"height", pi + 0.5}, {"amplitude", 0.1}, {"frequency", 2}},
                        C::ConvergedToGeodesic, {{"N", 128}, {"snapshot_every", 1000}}));
    return list;
}

} // namespace

const std::vector<Scenario>& scenario_catalog()
{
    static const std::vector<Scenario> catalog = build_catalog();
    return catalog;
}

const Scenario& find_scenario(const std::string& name)
{
    for (const auto& s : scenario_catalog()) {
        if (s.name == name)
            return s;
    }
    throw ConfigError("unknown scenario \"" + name + "\"");
}

std::vector<std::string> surface_catalog()
{
    return {"plane", "flat_torus", "ellipsoid", "skewed_torus", "revolution"};
}

DiscreteCurve build_initial(const Scenario& scenario)
{
    DiscreteCurve curve(scenario.surface,
                        sample_by_arclength(*scenario.surface, parametric_curve(scenario), scenario.config.vertices));
    if (self_intersects(curve))
        throw GeneratorSelfIntersects("generator \"" + scenario.generator.kind() + "\" of scenario \"" +
                                      scenario.name + "\" produced a self-intersecting curve");
    return curve;
}

std::vector<PlateauEvent> detect_plateaus(const FlowTrace& trace, double eps_k2, long min_duration)
{
    const auto& records = trace.records;
    const double exit_level = 10.0 * eps_k2;
    const long needed = std::max<long>(min_duration, 2);
    std::vector<PlateauEvent> plateaus;

    auto close = [&](std::size_t first, std::size_t last) {
        if (static_cast<long>(last - first + 1) < needed)
            return;
        double sum = 0.0;
        double lowest = records[first].int_k2;
        for (std::size_t j = first; j <= last; ++j) {
            sum += records[j].length;
            lowest = std::min(lowest, records[j].int_k2);
        }
        plateaus.push_back(PlateauEvent{records[first].step, records[last].step,
                                        sum / static_cast<double>(last - first + 1), lowest});
    };

    bool inside = false;
    std::size_t first = 0;
    std::size_t last_below = 0;
    for (std::size_t j = 0; j < records.size(); ++j) {
        const double value = records[j].int_k2;
        if (!inside) {
            if (value < eps_k2) {
                inside = true;
                first = last_below = j;
            }
            continue;
        }
        if (value < eps_k2) {
            last_below = j;
        } else if (!(value <= exit_level)) {
            close(first, last_below);
            inside = false;
        }
    }
    if (inside)
        close(first, last_below);
    return plateaus;
}

ScenarioOutcome run_scenario(const Scenario& scenario, const std::filesystem::path& output_dir)
{
    std::filesystem::create_directories(output_dir);
    const DiscreteCurve initial = build_initial(scenario);
    FlowResult result = run(initial, scenario.config);
    auto plateaus = detect_plateaus(result.trace, scenario.plateau_eps, scenario.plateau_min_duration);

    SelfCheck check = SelfCheck::None;
    if (scenario.expected)
        check = *scenario.expected == result.classification ? SelfCheck::Pass : SelfCheck::Fail;

    io::write_metrics_jsonl(output_dir / "metrics.jsonl", result.trace.records);
    for (const auto& snapshot : result.trace.snapshots)
        io::write_snapshot_csv(output_dir / io::snapshot_filename(snapshot.index), snapshot);

    Json manifest;
    manifest["scenario"] = scenario.name;
    manifest["surface"] = scenario.surface->to_json();
    manifest["generator"] = scenario.generator.params;
    manifest["config"] = scenario.config.to_json();
    manifest["classification"] = to_string(result.classification);
    manifest["final_length"] = result.trace.records.back().length;
    manifest["plateaus"] = plateau_json(plateaus);
    manifest["self_check"] = to_string(check);
    manifest["created_at"] = utc_timestamp();
    io::write_json_file(output_dir / "manifest.json", manifest);

    return ScenarioOutcome{std::move(result), std::move(plateaus), check};
}

} // namespace curveflow
