#pragma once

#include <stdexcept>
#include <string>

namespace loadkit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// case_io
struct MalformedCase : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct InvariantViolation : Error { using Error::Error; };
struct UnsupportedFeature : Error { using Error::Error; };

// powerflow
struct NonConvergence : Error {
    NonConvergence(const std::string& msg, double residual)
        : Error(msg), last_residual(residual) {}
    double last_residual;
};

// geometry
struct DegenerateCircle : Error { using Error::Error; };
struct DisjointCircles : Error { using Error::Error; };

// boundary
struct SolverFailure : Error { using Error::Error; };

// pareto
struct SingularSystem : Error {
    SingularSystem(const std::string& msg, int nullity)
        : Error(msg), null_space_dim(nullity) {}
    int null_space_dim;
};
struct NotPareto : Error { using Error::Error; };

// oracle
struct GridTooLarge : Error { using Error::Error; };

// thevenin
struct SingularNetwork : Error { using Error::Error; };

}  // namespace loadkit
