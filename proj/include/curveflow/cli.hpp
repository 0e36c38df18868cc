#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "curveflow/experiments.hpp"

namespace curveflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitSelfCheckFailed = 2;

/// Apply one `key=value` override. Bare keys address the flow config
/// (`N=256`); dotted keys address the scenario document
/// (`generator.amplitude=0.2`, `surface.a=3`, `plateau.eps_k2=1e-5`).
/// The value is read as JSON when it parses, otherwise as a string.
Scenario apply_override(const Scenario& scenario, const std::string& assignment);

/// Subcommands: list, run, suite, flow. `args` excludes the program name.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace curveflow::cli
