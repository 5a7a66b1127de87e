#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mkdv/oscillatory.hpp"

using namespace mkdv;
using std::numbers::pi;

namespace {
ProfileFn gaussian(double a, double w, double shift = 0.0) {
    return ProfileFn::from_function([=](double x) { return cd{a * std::exp(-(x - shift) * (x - shift) / (w * w)), 0.0}; },
                                    shift - 7.0 * w, shift + 7.0 * w, {});
}
}  // namespace

TEST_CASE("cubic phase: expanded and factored forms agree") {
    for (double xi : {-1.3, 0.2, 2.5})
        for (double a : {-0.7, 0.0, 1.1})
            for (double b : {-2.0, 0.4}) {
                const double e = CubicPhase::expanded(xi, a, b), f = CubicPhase::factored(xi, a, b);
                CHECK(e == doctest::Approx(f).epsilon(1e-12).scale(1.0));
            }
}

TEST_CASE("indicator of [-1,1] at t = 0, xi = 1") {
    auto ind = ProfileFn::from_function([](double) { return cd{1.0, 0.0}; }, -1.0, 1.0, {});
    auto r = trilinear_N_direct(ind, ind, ind, 0.0, 1.0);
    // (i / 4pi^2) * (1*1*1)(1) = (i / 4pi^2) * 2
    CHECK(r.value.real() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(r.value.imag() == doctest::Approx(1.0 / (2.0 * pi * pi)).epsilon(1e-10));
}

TEST_CASE("direct quadrature and the physical-space route agree") {
    auto g = gaussian(1.0, 1.0);
    for (double t : {0.1, 0.5}) {
        auto d = trilinear_N_direct(g, g, g, t, 1.0);
        auto s = N_spectral(g, g, g, t, {1.0});
        CHECK(std::abs(d.value - s[0]) < 1e-12);
    }
}

TEST_CASE("trilinear form is symmetric and Hermitian") {
    auto f = gaussian(1.0, 0.7), g = gaussian(0.5, 1.3, 0.4), h = gaussian(2.0, 0.9, -0.3);
    const double t = 0.2, xi = 0.8;
    auto a = N_spectral(f, g, h, t, {xi})[0];
    auto b = N_spectral(h, f, g, t, {xi})[0];
    auto c = N_spectral(g, h, f, t, {xi})[0];
    CHECK(std::abs(a - b) < 1e-13);
    CHECK(std::abs(a - c) < 1e-13);
    auto d = trilinear_N_direct(g, f, h, t, xi);
    CHECK(std::abs(a - d.value) < 1e-11);
    // real even Gaussians: N(-xi) = conj N(xi)
    auto e = gaussian(1.0, 1.0);
    auto v = N_spectral(e, e, e, t, {-xi, xi});
    CHECK(std::abs(v[0] - std::conj(v[1])) < 1e-14);
}

TEST_CASE("leading term constant for the unit profile") {
    auto one = ProfileFn::from_function([](double) { return cd{1.0, 0.0}; }, -10.0, 10.0, {});
    const cd L = leading_term_N(one, 1.0, 1.0);
    const cd expect = (cd{0.0, 1.0} + std::polar(1.0 / std::sqrt(3.0), 8.0 / 9.0)) / (4.0 * pi * std::sqrt(2.0));
    CHECK(std::abs(L - expect) < 1e-14);
}

TEST_CASE("remainder after the leading term decays in xi^3 t") {
    auto g = gaussian(1.0, 1.0);
    const double xi = 1.5;
    double prev = 0.0;
    for (double t : {10.0, 100.0, 1000.0}) {
        const double r = std::abs(N_spectral(g, g, g, t, {xi})[0] - leading_term_N(g, t, xi));
        if (prev > 0.0) CHECK(r < prev / 30.0);
        prev = r;
    }
    CHECK(remainder_gauge_value(cd{1e-6, 0}, cd{}, 100.0, 1.5, 1.0) > 0.0);
}

TEST_CASE("kernel K closed forms for a Gaussian") {
    auto g = gaussian(1.0, 1.0);
    CHECK(kernel_K(g, 0.0).value.real() == doctest::Approx(std::sqrt(2.0 * pi)).epsilon(1e-10));
    const cd k2 = std::exp(-2.0) * std::sqrt(cd(pi) / cd(0.5, -1.5));
    CHECK(std::abs(kernel_K(g, 2.0).value - k2) < 1e-10);
}

TEST_CASE("z-interaction gauge vanishes for z = 0") {
    auto grid = FrequencyGrid::uniform(512, 0.05);
    auto z = zero_perturbation(grid);
    auto v = Profile::sample(grid, 0.5, [](double x) { return cd{std::exp(-x * x), 0.0}; });
    CHECK(z_interaction_gauge(z, v, 0.5, ZPattern::zvv, {0.5, 1.0}) == 0.0);
}
