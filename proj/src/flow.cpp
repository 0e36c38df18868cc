#include "curveflow/flow.hpp"

#include <algorithm>
#include <cmath>

namespace curveflow {

namespace {

constexpr double kMonotonicitySlack = 1e-12;

} // namespace

void FlowConfig::validate() const
{
    if (!(dt_safety > 0.0 && dt_safety <= 1.0))
        throw ConfigError("dt_safety must lie in (0, 1]");
    if (resample_every < 1)
        throw ConfigError("resample_every must be >= 1");
    if (vertices < DiscreteCurve::kMinVertices)
        throw ConfigError("N must be >= 8");
    if (max_steps < 1)
        throw ConfigError("max_steps must be >= 1");
    if (!(tol_geodesic > 0.0) || !(tol_point > 0.0))
        throw ConfigError("tolerances must be positive");
    if (snapshot_every < 0)
        throw ConfigError("snapshot_every must be >= 0");
}

Json FlowConfig::to_json() const
{
    Json doc;
    doc["dt_safety"] = dt_safety;
    doc["resample_every"] = resample_every;
    doc["N"] = vertices;
    doc["max_steps"] = max_steps;
    doc["tol_geodesic"] = tol_geodesic;
    doc["tol_point"] = tol_point;
    doc["direction"] = direction == Direction::Forward ? "forward" : "backward";
    doc["snapshot_every"] = snapshot_every;
    return doc;
}

FlowConfig FlowConfig::from_json(const Json& doc)
{
    if (!doc.is_object())
        throw ConfigError("flow config must be an object");
    FlowConfig config;
    for (const auto& [key, value] : doc.items()) {
        const bool numeric = value.is_number();
        if (key == "direction") {
            const auto dir = value.is_string() ? value.get<std::string>() : std::string();
            if (dir == "forward")
                config.direction = Direction::Forward;
            else if (dir == "backward")
                config.direction = Direction::Backward;
            else
                throw ConfigError("direction must be \"forward\" or \"backward\"");
            continue;
        }
        if (!numeric)
            throw ConfigError("config key \"" + key + "\" must be numeric");
        if (key == "dt_safety")
            config.dt_safety = value.get<double>();
        else if (key == "resample_every")
            config.resample_every = value.get<long>();
        else if (key == "N")
            config.vertices = value.get<std::size_t>();
        else if (key == "max_steps")
            config.max_steps = value.get<long>();
        else if (key == "tol_geodesic")
            config.tol_geodesic = value.get<double>();
        else if (key == "tol_point")
            config.tol_point = value.get<double>();
        else if (key == "snapshot_every")
            config.snapshot_every = value.get<long>();
        else
            throw ConfigError("unknown config key \"" + key + "\"");
    }
    config.validate();
    return config;
}

FlowState::FlowState(DiscreteCurve initial, double time_, long step_, bool resampled_)
    : curve(std::move(initial)), time(time_), step(step_), resampled(resampled_), spacing(dual_spacing(curve)),
      curvature(curvature_vectors(curve, spacing))
{
}

double FlowState::max_curvature() const
{
    double largest = 0.0;
    for (const auto& k : curvature)
        largest = std::max(largest, k.norm());
    return largest;
}

double FlowState::int_k2() const
{
    return integral_k_squared(curvature, spacing);
}

std::string to_string(Classification c)
{
    switch (c) {
    case Classification::ConvergedToGeodesic:
        return "ConvergedToGeodesic";
    case Classification::ShrunkToPoint:
        return "ShrunkToPoint";
    case Classification::EmbeddednessLost:
        return "EmbeddednessLost";
    case Classification::MaxStepsReached:
        return "MaxStepsReached";
    }
    return "Unknown";
}

Classification classification_from_string(const std::string& name)
{
    for (auto c : {Classification::ConvergedToGeodesic, Classification::ShrunkToPoint,
                   Classification::EmbeddednessLost, Classification::MaxStepsReached}) {
        if (to_string(c) == name)
            return c;
    }
    throw ConfigError("unknown classification \"" + name + "\"");
}

MonotonicityViolated::MonotonicityViolated(const std::string& what, long step, double before, double after)
    : Error(what), step_(step), before_(before), after_(after)
{
}

double adaptive_dt(const FlowState& state, const FlowConfig& config)
{
    const double h = *std::min_element(state.spacing.begin(), state.spacing.end());
    if (!(h > 0.0))
        throw ZeroEdge("minimum dual spacing is zero");
    return config.dt_safety * h * h / 2.0;
}

FlowState step_with_dt(const FlowState& state, const FlowConfig& config, double dt)
{
    const DiscreteCurve& curve = state.curve;
    const Surface& surface = curve.surface();
    std::vector<Vec3> moved(curve.size());
    const std::size_t n = curve.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 chord = curve.edge((i + n - 1) % n) + curve.edge(i);
        const Vec3 tangent = surface.tangent_project(curve[i], chord).normalized();
        const Vec3& k = state.curvature[i];
        const Vec3 velocity = k - k.dot(tangent) * tangent;
        const Vec3 target = curve[i] + dt * velocity;
        if (!target.allFinite())
            throw NonFiniteState("vertex " + std::to_string(i) + " left the finite range at step " +
                                 std::to_string(state.step + 1));
        moved[i] = surface.project(target);
    }

    DiscreteCurve next(curve.surface_ptr(), std::move(moved));
    const long step_index = state.step + 1;
    const bool resample = config.direction == Direction::Forward && step_index % config.resample_every == 0;
    if (resample)
        next = resample_uniform(next, config.vertices);

    FlowState out(std::move(next), state.time + dt, step_index, resample);
    if (config.direction == Direction::Forward) {
        const double before = length(curve);
        const double after = length(out.curve);
        if (after > before * (1.0 + kMonotonicitySlack))
            throw MonotonicityViolated("length increased at step " + std::to_string(step_index), step_index,
                                       before, after);
    }
    return out;
}

FlowState step(const FlowState& state, const FlowConfig& config)
{
    const double dt = adaptive_dt(state, config);
    return step_with_dt(state, config, config.direction == Direction::Forward ? dt : -dt);
}

namespace {

TraceRecord make_record(const FlowState& state, double dt)
{
    return TraceRecord{state.step, state.time, dt, length(state.curve), state.max_curvature(), state.int_k2(),
                       state.resampled};
}

} // namespace

FlowResult run(const DiscreteCurve& initial, const FlowConfig& config)
{
    config.validate();
    const bool forward = config.direction == Direction::Forward;

    // Non-embedded starting curves are only meaningful in the plane; there
    // the monitor is switched off instead of firing on step 0.
    bool monitor = true;
    if (self_intersects(initial)) {
        if (initial.surface().kind() != SurfaceKind::Plane)
            throw InvalidCurve("initial curve is not embedded");
        monitor = false;
    }

    FlowState state(initial);
    FlowTrace trace;
    std::optional<long> lost_at;
    trace.records.push_back(make_record(state, 0.0));

    auto snapshot = [&](const FlowState& s) {
        trace.snapshots.push_back(
            Snapshot{static_cast<long>(trace.snapshots.size()), s.step, s.time, s.curve.vertices()});
    };
    snapshot(state);

    auto classify = [&]() -> std::optional<Classification> {
        const TraceRecord& last = trace.records.back();
        if (last.length <= config.tol_point)
            return Classification::ShrunkToPoint;
        if (last.max_k <= config.tol_geodesic)
            return Classification::ConvergedToGeodesic;
        if (monitor && !lost_at && state.step % config.resample_every == 0 && self_intersects(state.curve)) {
            lost_at = state.step;
            if (forward)
                return Classification::EmbeddednessLost;
        }
        return std::nullopt;
    };

    std::optional<Classification> outcome = classify();
    while (!outcome && state.step < config.max_steps) {
        try {
            FlowState next = step(state, config);
            const double dt = next.time - state.time;
            state = std::move(next);
            trace.records.push_back(make_record(state, dt));
        } catch (MonotonicityViolated& e) {
            e.attach(std::make_shared<const FlowTrace>(trace));
            throw;
        }
        if (config.snapshot_every > 0 && state.step % config.snapshot_every == 0)
            snapshot(state);
        outcome = classify();
    }
    if (trace.snapshots.back().step != state.step)
        snapshot(state);

    return FlowResult{outcome.value_or(Classification::MaxStepsReached), std::move(state), std::move(trace), lost_at};
}

std::vector<double> energy_balance_residual(const FlowTrace& trace)
{
    const auto& records = trace.records;
    std::vector<double> residuals;
    if (records.size() < 3)
        return residuals;
    for (std::size_t j = 1; j + 1 < records.size(); ++j) {
        if (records[j].resampled || records[j + 1].resampled)
            continue;
        const double rate = (records[j + 1].length - records[j - 1].length) / (records[j + 1].time - records[j - 1].time);
        const double dissipation = records[j].int_k2;
        if (std::abs(rate) < 1e-10 && dissipation < 1e-10) {
            residuals.push_back(0.0);
            continue;
        }
        residuals.push_back(std::abs(rate + dissipation) / std::max(dissipation, 1e-12));
    }
    return residuals;
}

} // namespace curveflow
