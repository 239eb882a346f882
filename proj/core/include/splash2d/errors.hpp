#pragma once

#include <stdexcept>
#include <string>

namespace splash2d {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GeometryError : Error { using Error::Error; };
struct OutOfDomain : Error { using Error::Error; };
struct BranchCutError : Error { using Error::Error; };
struct SingularJacobian : Error { using Error::Error; };
struct MeshFoldError : Error { using Error::Error; };
struct CompatibilityError : Error { using Error::Error; };
struct ParamError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };

struct SolverError : Error {
    double condition_estimate = 0.0;
    SolverError(const std::string& msg, double cond)
        : Error(msg + " (condition estimate " + std::to_string(cond) + ")"),
          condition_estimate(cond) {}
    explicit SolverError(const std::string& msg) : Error(msg) {}
};

}  // namespace splash2d
