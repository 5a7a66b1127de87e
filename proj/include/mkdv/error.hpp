#pragma once

#include <stdexcept>
#include <string>

namespace mkdv {

enum class ErrorKind {
    invalid_argument,
    aliasing,
    precondition,
    quadrature,     // unresolved oscillation; estimate() carries the error estimate
    divergence,     // shooting blew past the guard
    convergence,    // parameter search did not converge
    fit_window,
    guard,          // bootstrap guard tripped (an experimental outcome)
    corruption,
    io,
    config,
};

const char* to_string(ErrorKind k) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, double estimate = 0.0)
        : std::runtime_error(what), kind_(kind), estimate_(estimate) {}

    ErrorKind kind() const noexcept { return kind_; }
    double estimate() const noexcept { return estimate_; }

private:
    ErrorKind kind_;
    double estimate_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& msg, double estimate = 0.0) {
    throw Error(k, msg, estimate);
}

inline void require(bool cond, ErrorKind k, const std::string& msg) {
    if (!cond) fail(k, msg);
}

}  // namespace mkdv
