#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mkdv/cutoff.hpp"
#include "mkdv/fourier.hpp"
#include "mkdv/interp.hpp"
#include "mkdv/norms.hpp"

using namespace mkdv;
using std::numbers::pi;

namespace {

SpaceField gaussian_field(const SpaceGrid& g) {
    cvec v(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) v[j] = std::exp(-g.node(j) * g.node(j));
    return SpaceField(g, v, 0.0, true);
}

// Direct Riemann sum of int e^{i x xi} f(x) dx on a fine mesh.
cd riemann_hat(double xi) {
    cd s{};
    const double dx = 1e-3;
    for (double x = -12.0; x <= 12.0; x += dx) s += std::polar(std::exp(-x * x), x * xi);
    return s * dx;
}

}  // namespace

TEST_CASE("frequency grid excludes zero and is symmetric") {
    auto g = FrequencyGrid::uniform(64, 0.25);
    CHECK(g.node(g.first_positive()) == doctest::Approx(0.125));
    CHECK(g.node(g.first_positive() - 1) == doctest::Approx(-0.125));
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(g.node(g.mirror(k)) == doctest::Approx(-g.node(k)));
    CHECK_THROWS_AS(FrequencyGrid::uniform(63, 0.25), Error);
}

TEST_CASE("forward transform: zero, Gaussian oracle, round trip, Plancherel") {
    SpaceGrid sg(1024, 0.05);
    SpaceField zero(sg, cvec(sg.size()), 0.0, true);
    CHECK(forward_transform(zero).sup() == 0.0);

    auto f = gaussian_field(sg);
    auto fh = forward_transform(f);
    for (double xi : {0.0, 0.7, 1.5, -2.3, 4.0}) {
        HalfGridInterpolator ip(fh);
        // compare on nearest grid node to avoid interpolation error
        std::size_t k = 0;
        double best = 1e9;
        for (std::size_t i = 0; i < fh.size(); ++i)
            if (std::abs(fh.grid.node(i) - xi) < best) best = std::abs(fh.grid.node(i) - xi), k = i;
        const double x = fh.grid.node(k);
        CHECK(std::abs(fh.values[k] - riemann_hat(x)) < 1e-6);
        CHECK(std::abs(fh.values[k] - std::sqrt(pi) * std::exp(-x * x / 4.0)) < 1e-10);
    }
    auto back = inverse_transform(fh);
    double err = 0.0;
    for (std::size_t j = 0; j < sg.size(); ++j) err = std::max(err, std::abs(back.values[j] - f.values[j]));
    CHECK(err < 1e-10);
    CHECK(l2_space(f) == doctest::Approx(l2_freq(fh) / std::sqrt(2.0 * pi)).epsilon(1e-12));
    CHECK(hermitian_defect(fh.values) < 1e-12);
}

TEST_CASE("aliasing guard") {
    SpaceGrid coarse(64, 0.5);
    auto f = gaussian_field(coarse);
    CHECK_THROWS_AS(forward_transform(f, 100.0, 1e-9), Error);
    // x-grid too coarse to resolve e^{-x^2 * 400}
    cvec v(coarse.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::exp(-400.0 * coarse.node(j) * coarse.node(j));
    CHECK_THROWS_AS(forward_transform(SpaceField(coarse, v, 0.0, true)), Error);
}

TEST_CASE("airy propagator: identity at 0, unitarity, oracle values, constant profile") {
    auto g = FrequencyGrid::uniform(4096, 2.0 * pi / (4096 * 0.125));  // dx = 1/8 puts x = +-5 on nodes
    auto z = gaussian_perturbation(0.3, 1.0, g);
    auto z0 = airy_propagate(z, 0.0);
    double e0 = 0.0;
    for (std::size_t j = 0; j < z0.grid.size(); ++j) e0 = std::max(e0, std::abs(z0.values[j] - z.space.values[j]));
    CHECK(e0 < 1e-12);
    for (double t : {0.1, 0.5, 1.0}) {
        auto zt = airy_propagate(z, t);
        CHECK(l2_space(zt) == doctest::Approx(l2_space(z.space)).epsilon(1e-10));
        auto hat = forward_transform(zt, 1e-6);
        auto prof = profile_from_hat(hat.grid, hat.values, t);
        double d = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) d = std::max(d, std::abs(prof.values[k] - z.freq.values[k]));
        CHECK(d < 1e-8);
    }
    auto z1 = airy_propagate(z, 1.0);
    for (double x : {-5.0, 0.0, 5.0}) {
        // oracle: (1/2pi) int e^{-i x xi - i xi^3} 0.3 e^{-xi^2} dxi, fine midpoint mesh
        cd s{};
        const double d = 2e-4;
        for (double xi = -8.0 + d / 2; xi < 8.0; xi += d)
            s += std::polar(0.3 * std::exp(-xi * xi), -x * xi - xi * xi * xi);
        s *= d / (2.0 * pi);
        const std::size_t j = std::size_t(std::llround(x / z1.grid.dx() + 0.5 * double(z1.grid.size())));
        REQUIRE(std::abs(z1.grid.node(j) - x) < 1e-9);
        CHECK(std::abs(z1.values[j] - s) < 1e-8);
    }
}

TEST_CASE("e-norm closed forms") {
    auto g = FrequencyGrid::uniform(8192, 0.004);
    auto c = Profile::sample(g, 1.0, [](double) { return cd{0.7, 0.0}; });
    CHECK(e_norm(c) == doctest::Approx(0.7).epsilon(1e-12));
    auto ga = Profile::sample(g, 1.0, [](double xi) { return cd{std::exp(-xi * xi), 0.0}; });
    const double q = std::pow(pi / 2.0, 0.25);
    CHECK(e_norm(ga) == doctest::Approx(1.0 + q).epsilon(1e-5));
    ga.time = std::pow(2.0, -6.0);
    CHECK(e_norm(ga) == doctest::Approx(1.0 + 2.0 * q).epsilon(1e-5));
    auto sg = Profile::sample(g, 1.0, [](double xi) { return cd{xi > 0 ? 1.0 : -1.0, 0.0}; });
    CHECK(e_norm(sg) == doctest::Approx(1.0).epsilon(1e-14));
    ga.time = 0.0;
    CHECK_THROWS_AS(e_norm(ga), Error);
}

TEST_CASE("z-norm closed form, scaling, zero") {
    auto g = FrequencyGrid::uniform(8192, 0.0025);
    const double a = 0.2;
    auto z = gaussian_perturbation(a, 1.0, g);
    const double expect = a * (1.0 + 1.5 * std::sqrt(pi) + 2.0 * (1.0 + std::exp(1.0) * std::sqrt(pi) / 2.0 * std::erfc(1.0)));
    CHECK(z_norm(z) == doctest::Approx(expect).epsilon(1e-6));
    // finite-difference derivative: midpoint rule sees the |xi| kink at 0, O(h^2)
    CHECK(z.z_norm_components.total() == doctest::Approx(expect).epsilon(1e-5));
    auto z2 = gaussian_perturbation(2 * a, 1.0, g);
    CHECK(z_norm(z2) == doctest::Approx(2 * z_norm(z)).epsilon(1e-12));
    CHECK(z_norm(zero_perturbation(g)) == 0.0);
    // non-decaying z is rejected
    auto bad = Profile::sample(g, 0.0, [](double) { return cd{1.0, 0.0}; });
    CHECK_THROWS_AS(z_norm_components(z.space, bad), Error);
}

TEST_CASE("cutoff family") {
    CutoffFamily chi;
    CHECK(chi.chi_n(3.9, 4.0) == 1.0);
    CHECK(chi.chi_n(8.0, 4.0) == doctest::Approx(std::exp(-2.0 * std::exp(-1.0))));
    CHECK(chi.chi_n(12.0, 4.0) == doctest::Approx(0.0078).epsilon(0.02));
    for (double xi : {4.5, 7.0, 13.0}) {
        const double hgap = 1e-6;
        const double fd = (chi.chi_n(xi + hgap, 4.0) - chi.chi_n(xi - hgap, 4.0)) / (2 * hgap);
        CHECK(chi.dchi_n(xi, 4.0) == doctest::Approx(fd).epsilon(1e-6));
    }
    CHECK(chi.chi_n(chi.support_radius(4.0, 1e-3), 4.0) == doctest::Approx(1e-3).epsilon(1e-9));
}

TEST_CASE("xn-norm") {
    CutoffFamily chi;
    auto g = FrequencyGrid::uniform(4096, 0.004);
    CHECK(xn_norm(Profile::zeros(g, 1.0), chi, 4.0) == 0.0);
    auto ga = Profile::sample(g, 1.0, [](double xi) { return cd{std::exp(-xi * xi), 0.0}; });
    // oracle: midpoint quadrature of 4 xi^2 e^{-2 xi^2} / chi_n, with chi_n re-derived here
    auto chin = [](double xi) {
        const double s = std::abs(xi) / 4.0 - 1.0;
        return s > 0 ? std::exp(-2.0 * s * s * std::exp(-1.0 / s)) : 1.0;
    };
    double acc = 0.0;
    const double d = 1e-4;
    for (double xi = -8.0 + d / 2; xi < 8.0; xi += d) acc += 4 * xi * xi * std::exp(-2 * xi * xi) / chin(xi);
    const double sup = std::exp(-0.25 * g.spacing() * g.spacing());  // nearest nodes are +-h/2
    CHECK(xn_norm(ga, chi, 4.0) == doctest::Approx(sup + std::sqrt(acc * d)).epsilon(1e-6));
    // inside the plateau it matches the unweighted E-norm at t = 1
    CHECK(xn_norm(ga, chi, 4.0) == doctest::Approx(e_norm(ga)).epsilon(1e-8));
    auto wide = FrequencyGrid::uniform(4096, 0.1);
    CHECK_THROWS_AS(xn_norm(Profile::zeros(wide, 1.0), chi, 1.0), Error);
}

TEST_CASE("interpolation keeps the jump; derivative is one-sided at zero") {
    auto g = FrequencyGrid::uniform(256, 0.05);
    auto p = Profile::sample(g, 1.0, [](double xi) { return cd{xi > 0 ? 1.0 + xi * xi : -1.0 - 2.0 * xi * xi, 0.0}; });
    HalfGridInterpolator ip(p);
    CHECK(ip(1e-9).real() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ip(-1e-9).real() == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(ip(1.234).real() == doctest::Approx(1.0 + 1.234 * 1.234).epsilon(1e-12));
    CHECK(ip(-0.51).real() == doctest::Approx(-1.0 - 2.0 * 0.51 * 0.51).epsilon(1e-12));
    CHECK(ip(100.0) == cd{});
    auto d = half_grid_derivative(g, p.values);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double xi = g.node(k);
        CHECK(d[k].real() == doctest::Approx(xi > 0 ? 2 * xi : -4 * xi).epsilon(1e-9));
    }
}

TEST_CASE("pointwise decay gauge") {
    auto g = FrequencyGrid::uniform(1024, 0.02);
    SpaceField f(SpaceGrid(g), cvec(g.size()), 0.5, true);
    CHECK(pointwise_decay_ratio(f, DecayGauge::e_type, 1.0) == 0.0);
    CHECK_THROWS_AS(pointwise_decay_ratio(f, DecayGauge::e_type, 0.0), Error);
}
