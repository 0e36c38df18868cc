#pragma once

#include <stdexcept>
#include <string>

namespace curveflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The level-function gradient vanishes (or the point sits on the axis of a
/// surface of revolution), so no normal direction is defined.
class DegenerateGradient : public Error {
public:
    using Error::Error;
};

/// Newton projection onto an implicit surface did not reach tolerance.
class ProjectionDiverged : public Error {
public:
    using Error::Error;
};

/// A curve violates one of its structural invariants.
class InvalidCurve : public Error {
public:
    using Error::Error;
};

/// The time step would be built from a zero edge spacing.
class ZeroEdge : public Error {
public:
    using Error::Error;
};

/// A scenario generator produced a self-intersecting initial curve.
class GeneratorSelfIntersects : public Error {
public:
    using Error::Error;
};

/// Malformed config document or unknown catalog entry.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace curveflow
