#include <doctest.h>

#include <cmath>
#include <random>

#include "mkdv/fit.hpp"

using namespace mkdv;

TEST_CASE("linear fit recovers an exact line") {
    rvec x{0, 1, 2, 3, 4}, y;
    for (double v : x) y.push_back(2.0 - 0.5 * v);
    auto f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("power-law exponent: exact and noisy series") {
    std::vector<std::pair<double, double>> s;
    for (int k = 0; k <= 20; ++k) {
        const double t = std::pow(10.0, -3.0 + 2.0 * k / 20.0);
        s.emplace_back(t, 3.0 * std::pow(t, 1.0 / 9.0));
    }
    CHECK(fit_decay_exponent(s).exponent == doctest::Approx(1.0 / 9.0).epsilon(1e-10));

    std::mt19937 rng(12345);
    std::normal_distribution<double> noise(0.0, 0.05);
    for (auto& [t, v] : s) v *= 1.0 + noise(rng);
    auto f = fit_decay_exponent(s);
    CHECK(std::abs(f.exponent - 1.0 / 9.0) < 0.03);
    CHECK(f.stderr_ > 0.0);
}

TEST_CASE("power-law fit rejects short or narrow windows and bad values") {
    std::vector<std::pair<double, double>> s;
    for (int k = 0; k < 5; ++k) s.emplace_back(1.0 + k, 1.0);
    CHECK_THROWS_AS(fit_decay_exponent(s), Error);
    s.clear();
    for (int k = 0; k < 12; ++k) s.emplace_back(1.0 + 0.1 * k, 1.0 + k);
    try {
        fit_decay_exponent(s);
        FAIL("expected fit_window");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::fit_window);
    }
    s.clear();
    for (int k = 0; k < 12; ++k) s.emplace_back(std::pow(10.0, -k * 0.2), k == 3 ? 0.0 : 1.0);
    CHECK_THROWS_AS(fit_decay_exponent(s), Error);
}
