#pragma once

#include "mkdv/profile.hpp"

namespace mkdv {

/// Cubic (4-point Lagrange) interpolation of a profile, one half-grid at a
/// time: stencils never straddle xi = 0, so the jump there is preserved.
/// Outside [-xi_max, xi_max] returns `outside` (zero by default).
class HalfGridInterpolator {
public:
    explicit HalfGridInterpolator(const Profile& p, cd outside = cd{0.0, 0.0});
    HalfGridInterpolator(FrequencyGrid g, cvec values, cd outside = cd{0.0, 0.0});

    cd operator()(double xi) const;
    bool inside(double xi) const noexcept { return std::abs(xi) <= grid_.max_frequency(); }
    const FrequencyGrid& grid() const noexcept { return grid_; }

private:
    FrequencyGrid grid_;
    cvec v_;
    cd outside_;
};

/// Same rule without owning the data.
cd interp_half_grid(const FrequencyGrid& g, const cvec& v, double xi, cd outside = cd{0.0, 0.0});

/// d/dxi on each half-grid separately: 4th-order central differences inside,
/// one-sided second-order differences at the two ends of each half (so the
/// value across xi = 0 never enters).
cvec half_grid_derivative(const FrequencyGrid& g, const cvec& v);

}  // namespace mkdv
