#pragma once

#include <stdexcept>
#include <string>

namespace fpm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GeometryError : Error {
    using Error::Error;
};

struct MeshError : Error {
    using Error::Error;
};

// Derivative recovery failed; carries a condition-number estimate so the
// caller can decide whether a larger support ring is worth a retry.
struct RecoveryError : Error {
    double condition;
    explicit RecoveryError(const std::string& msg, double cond = 0.0)
        : Error(msg), condition(cond) {}
};

struct IsolatedPointError : Error {
    int point;
    explicit IsolatedPointError(const std::string& msg, int p = -1)
        : Error(msg), point(p) {}
};

struct ConstraintError : Error {
    using Error::Error;
};

struct SingularSystemError : Error {
    int dof;
    explicit SingularSystemError(const std::string& msg, int d = -1)
        : Error(msg), dof(d) {}
};

struct FractureError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace fpm
