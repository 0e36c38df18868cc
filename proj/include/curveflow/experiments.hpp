#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "curveflow/flow.hpp"

namespace curveflow {

/// Initial-curve generator: a kind tag plus its numeric (and axis) parameters,
/// kept as the JSON object that is written to the manifest.
///
/// Kinds and parameters (defaults in brackets):
///   circle             radius [1], center_x [0], center_y [0]          plane
///   star               radius [1], amplitude [0.3], lobes [5]          plane
///   blob               amplitude [0.3]                                 plane
///   ellipse            semi_major [1], semi_minor [0.5]                plane
///   ellipsoid_section  plane ["x"], axis ["y"], tilt [0], roll [0]     ellipsoid
///   ellipsoid_slice    height [0]                                      ellipsoid
///   torus_loop         k [1], l [0], phi0 [0], psi0 [0],
///                      amplitude [0], frequency [2]                    skewed torus
///   flat_torus_loop    p [1], q [0], x0 [0], y0 [0.5],
///                      amplitude [0.05], frequency [1]                 flat torus
///   revolution_circle  height [0], amplitude [0.1], frequency [2]      revolution
struct GeneratorSpec {
    Json params;

    std::string kind() const;
    double number(const char* key, double fallback) const;
    std::string text(const char* key, const std::string& fallback) const;
};

struct Scenario {
    std::string name;
    std::string description;
    std::shared_ptr<const Surface> surface;
    GeneratorSpec generator;
    FlowConfig config;
    std::optional<Classification> expected;
    double plateau_eps = 1e-4;
    long plateau_min_duration = 100;

    Json to_json() const;
    static Scenario from_json(const Json& doc);
};

/// Interval of the trace where int k^2 ds stays small: a visit near a
/// critical point of the length.
struct PlateauEvent {
    long start_step;
    long end_step;
    double mean_length;
    double min_int_k2;
};

enum class SelfCheck { Pass, Fail, None };
std::string to_string(SelfCheck check);

struct ScenarioOutcome {
    FlowResult result;
    std::vector<PlateauEvent> plateaus;
    SelfCheck self_check;
};

/// Built-in scenarios, one or more per catalog surface.
const std::vector<Scenario>& scenario_catalog();
const Scenario& find_scenario(const std::string& name);

/// Names of the surfaces accepted in config documents.
std::vector<std::string> surface_catalog();

/// Sample the generator with config.vertices points.
/// Throws GeneratorSelfIntersects if the result is not embedded.
DiscreteCurve build_initial(const Scenario& scenario);

/// Maximal runs with int_k2 < eps_k2 lasting at least min_duration records.
/// Runs separated only by excursions that stay at or below 10 eps_k2 are
/// merged into one plateau.
std::vector<PlateauEvent> detect_plateaus(const FlowTrace& trace, double eps_k2, long min_duration);

/// Run the flow and write metrics.jsonl, snapshot_NNNNN.csv and
/// manifest.json into `output_dir` (created if missing).
ScenarioOutcome run_scenario(const Scenario& scenario, const std::filesystem::path& output_dir);

} // namespace curveflow
