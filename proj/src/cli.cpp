#include "curveflow/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "curveflow/io.hpp"

namespace curveflow::cli {

namespace {

std::vector<std::string> split_path(const std::string& key)
{
    std::vector<std::string> parts;
    std::stringstream stream(key);
    std::string part;
    while (std::getline(stream, part, '.')) {
        if (part.empty())
            throw ConfigError("malformed override key \"" + key + "\"");
        parts.push_back(part);
    }
    return parts;
}

Json parse_value(const std::string& text)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error&) {
        return Json(text);
    }
}

// Serialises log lines from concurrent scenario runs.
class Log {
public:
    Log(std::ostream& out, bool quiet) : out_(out), quiet_(quiet) {}

    void line(const std::string& text)
    {
        if (quiet_)
            return;
        std::lock_guard lock(mutex_);
        out_ << text << std::endl;
    }

private:
    std::ostream& out_;
    bool quiet_;
    std::mutex mutex_;
};

std::filesystem::path default_output_dir()
{
    if (const char* env = std::getenv("CURVEFLOW_OUT"); env != nullptr && *env != '\0')
        return env;
    return "out";
}

struct RunReport {
    std::string name;
    std::string classification;
    double final_length = 0.0;
    std::size_t plateaus = 0;
    SelfCheck check = SelfCheck::None;
    std::string error;
};

RunReport run_one(const Scenario& scenario, const std::filesystem::path& root, Log& log)
{
    RunReport report;
    report.name = scenario.name;
    log.line("[" + scenario.name + "] start: " + scenario.description);
    try {
        const auto outcome = run_scenario(scenario, root / scenario.name);
        report.classification = to_string(outcome.result.classification);
        report.final_length = outcome.result.trace.records.back().length;
        report.plateaus = outcome.plateaus.size();
        report.check = outcome.self_check;
        std::ostringstream text;
        text << "[" << scenario.name << "] " << report.classification << " after "
             << outcome.result.final_state.step << " steps, t = " << io::format_double(outcome.result.final_state.time)
             << ", length = " << io::format_double(report.final_length) << ", plateaus = " << report.plateaus
             << ", self_check = " << to_string(report.check);
        log.line(text.str());
    } catch (const std::exception& e) {
        report.error = e.what();
        log.line("[" + scenario.name + "] error: " + report.error);
    }
    return report;
}

int exit_code(const std::vector<RunReport>& reports, std::ostream& err)
{
    int code = kExitOk;
    for (const auto& r : reports) {
        if (!r.error.empty()) {
            err << "error: scenario " << r.name << ": " << r.error << '\n';
            code = kExitError;
        } else if (r.check == SelfCheck::Fail && code == kExitOk) {
            err << "self-check failed: scenario " << r.name << " ended " << r.classification << '\n';
            code = kExitSelfCheckFailed;
        } else if (r.check == SelfCheck::Fail) {
            err << "self-check failed: scenario " << r.name << " ended " << r.classification << '\n';
        }
    }
    return code;
}

Scenario with_overrides(Scenario scenario, const std::vector<std::string>& assignments)
{
    for (const auto& a : assignments)
        scenario = apply_override(scenario, a);
    return scenario;
}

} // namespace

Scenario apply_override(const Scenario& scenario, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override \"" + assignment + "\" is not of the form key=value");
    auto path = split_path(assignment.substr(0, eq));
    const Json value = parse_value(assignment.substr(eq + 1));
    Json doc = scenario.to_json();
    // Bare keys address the flow config, except the scalar scenario fields
    // (scenario, description, expected).
    if (path.size() == 1 && !(doc.contains(path[0]) && !doc[path[0]].is_object()))
        path.insert(path.begin(), "config");

    Json* node = &doc;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (!node->is_object() || !node->contains(path[i]) || !(*node)[path[i]].is_object())
            throw ConfigError("override \"" + assignment + "\" does not name a known key");
        node = &(*node)[path[i]];
    }
    // Generator parameters have implicit defaults, so they may be absent from
    // the document; build_initial rejects names the generator does not know.
    const bool generator_key = path.size() == 2 && path[0] == "generator";
    if (!generator_key && !node->contains(path.back()))
        throw ConfigError("override \"" + assignment + "\" does not name a known key");
    (*node)[path.back()] = value;
    return Scenario::from_json(doc);
}

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app("Curve shortening flow on surfaces", "curveflow");
    app.require_subcommand(1);
    app.fallthrough();
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "Suppress progress lines");

    auto* list = app.add_subcommand("list", "Print the surface and scenario catalogs");

    std::string scenario_name;
    std::string out_dir;
    std::vector<std::string> overrides;
    auto* run = app.add_subcommand("run", "Run one built-in scenario");
    run->add_option("--scenario", scenario_name, "Scenario name (see `list`)")->required();
    run->add_option("--out", out_dir, "Output root; default $CURVEFLOW_OUT or ./out");
    run->add_option("--set", overrides, "Override key=value (bare keys address the flow config)");

    unsigned jobs = 1;
    auto* suite = app.add_subcommand("suite", "Run every built-in scenario");
    suite->add_option("--out", out_dir, "Output root; default $CURVEFLOW_OUT or ./out");
    suite->add_option("--jobs", jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);
    suite->add_option("--set", overrides, "Override applied to every scenario");

    std::string config_file;
    auto* flow = app.add_subcommand("flow", "Run an ad-hoc scenario document");
    flow->add_option("--config", config_file, "Scenario JSON document")->required();
    flow->add_option("--out", out_dir, "Output root; default $CURVEFLOW_OUT or ./out");
    flow->add_option("--set", overrides, "Override key=value");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    const std::filesystem::path root = out_dir.empty() ? default_output_dir() : std::filesystem::path(out_dir);
    Log log(out, quiet);
    try {
        if (list->parsed()) {
            out << "surfaces:\n";
            for (const auto& s : surface_catalog())
                out << "  " << s << '\n';
            out << "scenarios:\n";
            for (const auto& s : scenario_catalog())
                out << "  " << s.name << " (" << s.surface->name() << "): " << s.description << '\n';
            return kExitOk;
        }
        if (run->parsed()) {
            const Scenario scenario = with_overrides(find_scenario(scenario_name), overrides);
            return exit_code({run_one(scenario, root, log)}, err);
        }
        if (flow->parsed()) {
            const Scenario scenario = with_overrides(Scenario::from_json(io::read_json_file(config_file)), overrides);
            return exit_code({run_one(scenario, root, log)}, err);
        }
        if (suite->parsed()) {
            std::vector<Scenario> scenarios;
            for (const auto& s : scenario_catalog())
                scenarios.push_back(with_overrides(s, overrides));
            std::vector<RunReport> reports(scenarios.size());
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (std::size_t i = next++; i < scenarios.size(); i = next++)
                    reports[i] = run_one(scenarios[i], root, log);
            };
            std::vector<std::thread> pool;
            const unsigned workers = std::min<unsigned>(jobs, static_cast<unsigned>(scenarios.size()));
            for (unsigned w = 1; w < workers; ++w)
                pool.emplace_back(worker);
            worker();
            for (auto& t : pool)
                t.join();
            return exit_code(reports, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    err << app.help();
    return kExitError;
}

} // namespace curveflow::cli
