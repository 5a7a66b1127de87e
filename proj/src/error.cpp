#include "mkdv/error.hpp"

namespace mkdv {

const char* to_string(ErrorKind k) noexcept {
    switch (k) {
        case ErrorKind::invalid_argument: return "invalid_argument";
        case ErrorKind::aliasing: return "aliasing";
        case ErrorKind::precondition: return "precondition";
        case ErrorKind::quadrature: return "quadrature";
        case ErrorKind::divergence: return "divergence";
        case ErrorKind::convergence: return "convergence";
        case ErrorKind::fit_window: return "fit_window";
        case ErrorKind::guard: return "guard";
        case ErrorKind::corruption: return "corruption";
        case ErrorKind::io: return "io";
        case ErrorKind::config: return "config";
    }
    return "unknown";
}

}  // namespace mkdv
