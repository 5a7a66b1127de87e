#pragma once

#include <array>
#include <functional>

#include "mkdv/grid.hpp"

namespace mkdv {

/// Sampled profile u~(t, xi) = e^{i t xi^3} u^(t, xi).
struct Profile {
    FrequencyGrid grid;
    cvec values;
    double time = 0.0;

    Profile() = default;
    Profile(FrequencyGrid g, cvec v, double t);
    static Profile zeros(const FrequencyGrid& g, double t);
    static Profile sample(const FrequencyGrid& g, double t, const std::function<cd(double)>& f);

    std::size_t size() const noexcept { return values.size(); }
    /// Finite values, one per node, t >= 0.
    void validate() const;
    double sup() const;
    /// Limits at 0-/0+ taken as the nodes adjacent to zero.
    cd left_limit() const { return values[grid.first_positive() - 1]; }
    cd right_limit() const { return values[grid.first_positive()]; }
};

/// Uniform-grid physical field u(t, x).
struct SpaceField {
    SpaceGrid grid;
    cvec values;
    double time = 0.0;
    bool real = true;

    SpaceField() = default;
    SpaceField(SpaceGrid g, cvec v, double t, bool is_real = true);

    /// Throws if a field declared real carries an imaginary part above tol * sup.
    void validate(double tol = 1e-10) const;
    double sup() const;
};

struct ZNormComponents {
    double l1_space = 0.0;    // ||z||_{L^1}
    double l1_weighted = 0.0; // ||<xi>^2 z^||_{L^1}
    double l1_deriv = 0.0;    // ||<xi> d_xi z^||_{L^1}
    double total() const noexcept { return l1_space + l1_weighted + l1_deriv; }
};

/// Time-independent linear perturbation z (profile of e^{-t d^3} z is z^).
struct Perturbation {
    SpaceField space;
    Profile freq;
    ZNormComponents z_norm_components;
    /// Optional closed form for z^ so other grids can be sampled exactly.
    std::function<cd(double)> hat_fn;
    std::function<cd(double)> dhat_fn;

    /// Samples z^ on a grid (closed form when available, interpolation otherwise).
    cvec hat_on(const FrequencyGrid& g) const;
    cvec dhat_on(const FrequencyGrid& g) const;
};

/// z^(xi) = a exp(-xi^2 / w^2): a real, even Schwartz perturbation.
Perturbation gaussian_perturbation(double amplitude, double width, const FrequencyGrid& g);
Perturbation zero_perturbation(const FrequencyGrid& g);

}  // namespace mkdv
