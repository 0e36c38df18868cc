#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "curveflow/curve.hpp"
#include "curveflow/errors.hpp"

namespace curveflow {

enum class Direction { Forward, Backward };

struct FlowConfig {
    double dt_safety = 0.2;     ///< CFL factor in (0, 1]
    long resample_every = 10;   ///< steps between uniform resamplings
    std::size_t vertices = 256; ///< resampling target N
    long max_steps = 100000;
    double tol_geodesic = 1e-3; ///< max |K_i| for ConvergedToGeodesic
    double tol_point = 1e-2;    ///< length for ShrunkToPoint
    Direction direction = Direction::Forward;
    long snapshot_every = 0;    ///< 0 keeps only the first and last curve

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    Json to_json() const;
    /// Missing keys keep their defaults; unknown keys are rejected.
    static FlowConfig from_json(const Json& doc);
};

/// Curve at flow time t with the geometry the next step consumes.
struct FlowState {
    DiscreteCurve curve;
    double time = 0.0;
    long step = 0;
    bool resampled = false;
    std::vector<double> spacing;
    std::vector<Vec3> curvature;

    explicit FlowState(DiscreteCurve initial, double time = 0.0, long step = 0, bool resampled = false);

    double max_curvature() const;
    double int_k2() const;
};

struct TraceRecord {
    long step;
    double time;
    double dt;
    double length;
    double max_k;
    double int_k2;
    bool resampled;
};

struct Snapshot {
    long index;
    long step;
    double time;
    std::vector<Vec3> vertices;
};

struct FlowTrace {
    std::vector<TraceRecord> records;
    std::vector<Snapshot> snapshots;
};

enum class Classification { ConvergedToGeodesic, ShrunkToPoint, EmbeddednessLost, MaxStepsReached };

std::string to_string(Classification c);
Classification classification_from_string(const std::string& name);

struct FlowResult {
    Classification classification;
    FlowState final_state;
    FlowTrace trace;
    /// Backward runs only report loss of embeddedness; this is the first step it was seen.
    std::optional<long> embeddedness_lost_step;
};

/// Forward step increased the length: the explicit scheme went unstable.
class MonotonicityViolated : public Error {
public:
    MonotonicityViolated(const std::string& what, long step, double before, double after);

    long step() const { return step_; }
    double length_before() const { return before_; }
    double length_after() const { return after_; }
    /// Trace up to the failing step; attached by run().
    const std::shared_ptr<const FlowTrace>& trace() const { return trace_; }
    void attach(std::shared_ptr<const FlowTrace> trace) { trace_ = std::move(trace); }

private:
    long step_;
    double before_;
    double after_;
    std::shared_ptr<const FlowTrace> trace_;
};

/// Vertex coordinates overflowed (backward flow blow-up).
class NonFiniteState : public Error {
public:
    using Error::Error;
};

/// dt_safety * min(h)^2 / 2.
double adaptive_dt(const FlowState& state, const FlowConfig& config);

/// One explicit step p_i <- P(p_i + dt K_i) with a signed dt, followed by
/// resampling when the step counter hits the cadence (forward mode only).
FlowState step_with_dt(const FlowState& state, const FlowConfig& config, double dt);

/// step_with_dt with dt = adaptive_dt, negated in backward mode.
FlowState step(const FlowState& state, const FlowConfig& config);

/// Integrate until a terminal classification fires or max_steps is reached.
FlowResult run(const DiscreteCurve& initial, const FlowConfig& config);

/// Per-record |dL/dt + int k^2 ds| / max(int k^2 ds, 1e-12), with dL/dt from
/// central differences; records next to a resampling event are skipped.
std::vector<double> energy_balance_residual(const FlowTrace& trace);

} // namespace curveflow
