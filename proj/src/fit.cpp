#include "mkdv/fit.hpp"

#include <gsl/gsl_fit.h>

#include <algorithm>
#include <cmath>

namespace mkdv {

LinearFit linear_fit(const rvec& x, const rvec& y) {
    require(x.size() == y.size() && x.size() >= 3, ErrorKind::fit_window, "linear_fit: need >= 3 points");
    double c0, c1, cov00, cov01, cov11, sumsq;
    gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
    LinearFit f;
    f.intercept = c0;
    f.slope = c1;
    f.points = x.size();
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= double(y.size());
    double tot = 0.0;
    for (double v : y) tot += (v - mean) * (v - mean);
    f.r2 = tot > 0.0 ? 1.0 - sumsq / tot : 1.0;
    // gsl scales the covariance by the residual variance already
    f.slope_stderr = std::sqrt(std::max(cov11, 0.0));
    f.intercept_stderr = std::sqrt(std::max(cov00, 0.0));
    return f;
}

PowerLawFit fit_decay_exponent(const std::vector<std::pair<double, double>>& series, std::size_t min_points,
                               double min_decades) {
    if (series.size() < min_points)
        fail(ErrorKind::fit_window, "fit_decay_exponent: " + std::to_string(series.size()) + " points, need " +
                                        std::to_string(min_points));
    rvec lx, ly;
    double tmin = INFINITY, tmax = 0.0;
    for (auto [t, v] : series) {
        if (!(t > 0.0)) fail(ErrorKind::invalid_argument, "fit_decay_exponent: times must be positive");
        if (!(v > 0.0)) fail(ErrorKind::invalid_argument, "fit_decay_exponent: values must be positive");
        lx.push_back(std::log(t));
        ly.push_back(std::log(v));
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
    }
    if (std::log10(tmax / tmin) < min_decades - 1e-12)
        fail(ErrorKind::fit_window, "fit_decay_exponent: window spans less than the required decades");
    const LinearFit lf = linear_fit(lx, ly);
    return PowerLawFit{lf.slope, lf.intercept, lf.slope_stderr, lf.r2, lf.points};
}

}  // namespace mkdv
