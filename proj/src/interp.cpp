#include "mkdv/interp.hpp"

#include <algorithm>
#include <cmath>

namespace mkdv {

HalfGridInterpolator::HalfGridInterpolator(const Profile& p, cd outside)
    : HalfGridInterpolator(p.grid, p.values, outside) {}

HalfGridInterpolator::HalfGridInterpolator(FrequencyGrid g, cvec values, cd outside)
    : grid_(std::move(g)), v_(std::move(values)), outside_(outside) {
    require(v_.size() == grid_.size() && grid_.size() >= 8, ErrorKind::invalid_argument,
            "interpolator needs >= 4 nodes per half-grid");
}

cd HalfGridInterpolator::operator()(double xi) const { return interp_half_grid(grid_, v_, xi, outside_); }

cd interp_half_grid(const FrequencyGrid& g, const cvec& v, double xi, cd outside) {
    if (!(std::abs(xi) <= g.max_frequency())) return outside;
    const std::size_t half = g.size() / 2;
    const double h = g.spacing();
    // Local coordinate within the half containing xi; xi == 0 goes right.
    const std::size_t base = xi >= 0.0 ? half : 0;
    const double s = (xi - g.node(base)) / h;
    long i0 = long(std::floor(s)) - 1;
    i0 = std::clamp<long>(i0, 0, long(half) - 4);
    cd acc{};
    for (int a = 0; a < 4; ++a) {
        double w = 1.0;
        for (int b = 0; b < 4; ++b)
            if (b != a) w *= (s - double(i0 + b)) / double(a - b);
        acc += w * v[base + std::size_t(i0 + a)];
    }
    return acc;
}

cvec half_grid_derivative(const FrequencyGrid& g, const cvec& v) {
    require(v.size() == g.size() && g.size() >= 12, ErrorKind::invalid_argument,
            "half_grid_derivative: need >= 6 nodes per half");
    const std::size_t half = g.size() / 2;
    const double h = g.spacing();
    cvec d(v.size());
    for (std::size_t base : {std::size_t{0}, half}) {
        const cd* u = v.data() + base;
        cd* o = d.data() + base;
        const std::size_t L = half;
        o[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
        o[L - 1] = (3.0 * u[L - 1] - 4.0 * u[L - 2] + u[L - 3]) / (2.0 * h);
        o[1] = (u[2] - u[0]) / (2.0 * h);
        o[L - 2] = (u[L - 1] - u[L - 3]) / (2.0 * h);
        for (std::size_t i = 2; i + 2 < L; ++i)
            o[i] = (-u[i + 2] + 8.0 * u[i + 1] - 8.0 * u[i - 1] + u[i - 2]) / (12.0 * h);
    }
    return d;
}

}  // namespace mkdv
