#pragma once

#include <stdexcept>
#include <string>

namespace nodal {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid input file / JSON text.
class ParseError : public Error {
public:
    using Error::Error;
};

// Polygon validation, region construction, start-point preconditions.
class GeometryError : public Error {
public:
    using Error::Error;
};

// Triangulation failures (bad h, non-meshable input).
class MeshError : public Error {
public:
    using Error::Error;
};

// Numerical failures: eigensolver non-convergence, step-too-large, factorization.
class SolverError : public Error {
public:
    using Error::Error;
};

// Nodal extraction produced a domain count other than 2; usually means the mesh
// is too coarse or the eigenvalue is nearly degenerate.  Callers that certify
// claims downgrade this to an "inconclusive" verdict instead of failing hard.
class NodalCountError : public SolverError {
public:
    explicit NodalCountError(int count)
        : SolverError("nodal domain count is " + std::to_string(count) +
                      ", expected 2 (mesh too coarse or near-degenerate eigenvalue)"),
          count_(count) {}
    int count() const { return count_; }

private:
    int count_;
};

// Suite configuration problems: unknown claim ids, missing parameters.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace nodal
