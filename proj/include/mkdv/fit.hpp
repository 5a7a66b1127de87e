#pragma once

#include <utility>
#include <vector>

#include "mkdv/grid.hpp"

namespace mkdv {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope x.
LinearFit linear_fit(const rvec& x, const rvec& y);

struct PowerLawFit {
    double exponent = 0.0;
    double intercept = 0.0;  // log-space
    double stderr_ = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

/// Least squares on (log t, log value). Needs >= min_points spanning >= min_decades.
PowerLawFit fit_decay_exponent(const std::vector<std::pair<double, double>>& series,
                               std::size_t min_points = 8, double min_decades = 1.0);

}  // namespace mkdv
