#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mkdv/norms.hpp"
#include "mkdv/selfsimilar.hpp"

using namespace mkdv;
using std::numbers::pi;

namespace {
const SelfSimilarProfile& small_c() {
    static const SelfSimilarProfile S = build_selfsimilar(0.05, 0.0);
    return S;
}
}  // namespace

TEST_CASE("trivial parameters give the zero profile") {
    auto S = build_selfsimilar(0.0, 0.0);
    CHECK(S.trivial());
    CHECK(S.eval(0.7) == cd{});
    CHECK(S.eval_N1(2.0) == cd{});
    CHECK(selfsim_residual(S, 0.5, 0.51, {1.0}) == 0.0);
}

TEST_CASE("c branch: matching, ODE residual, asymptotics") {
    const auto& S = small_c();
    CHECK(S.eval(1e-4).real() == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(S.fitted.c_fit == doctest::Approx(0.05).epsilon(1e-5));
    CHECK(ode_residual(S.V, 0.0, -50.0, 10.0) < 1e-9);
    CHECK(S.fitted.large_resolved);
    CHECK(std::abs(S.fitted.A) == doctest::Approx(0.05).epsilon(2e-3));
    // phase slope fixed by |A|: a = -3|A|^2 / (4 pi)
    const double a_pred = -3.0 * std::norm(S.fitted.A) / (4.0 * pi);
    CHECK(S.fitted.a == doctest::Approx(a_pred).epsilon(0.02));
    CHECK(S.fitted.phase_r2 > 0.999);
    CHECK(std::abs(S.fitted.jump_im) < 1e-6);
}

TEST_CASE("profile is self-similar: E-norm constant and the profile equation holds") {
    const auto& S = small_c();
    auto g = FrequencyGrid::uniform(4096, 0.005);
    const double e1 = e_norm(S.profile_at(0.1, g));
    const double e2 = e_norm(S.profile_at(1.0, g));
    CHECK(e1 == doctest::Approx(e2).epsilon(1e-4));
    CHECK(selfsim_residual(S, 0.5, 0.501, {0.25, 0.5, 1.0, 1.5, 2.0}) < 1e-7);
    // continuation beyond the band is continuous
    const double b = S.S_freq.grid.max_frequency();
    CHECK(std::abs(S.eval(b * (1 - 1e-9)) - S.eval(b * (1 + 1e-9))) < 1e-6);
    CHECK(std::abs(S.eval(-1.3) - std::conj(S.eval(1.3))) < 1e-12);
}

TEST_CASE("sign symmetry: c -> -c flips the profile") {
    const auto& S = small_c();
    auto M = build_selfsimilar(-0.05, 0.0);
    for (double eta : {0.1, 0.8, 2.0, 5.0}) CHECK(std::abs(M.eval(eta) + S.eval(eta)) < 1e-8);
}

TEST_CASE("truncated family") {
    const auto& S = small_c();
    CutoffFamily cf;
    auto g = FrequencyGrid::uniform(2048, 0.02);
    const double t = 0.3, n = 2.0;
    auto Sn = truncate_Sn(S, g, cf, n, t);
    for (std::size_t k : {std::size_t(1030), std::size_t(1500), std::size_t(2000)}) {
        const double eta = std::cbrt(t) * g.node(k);
        CHECK(std::abs(Sn.values[k] - cf.chi_n(eta, n) * S.eval(eta)) < 1e-15);
    }
    CHECK_THROWS_AS(truncate_Sn(S, g, cf, n, 0.0), Error);
}

TEST_CASE("alpha branch: jump at zero and fitted alpha") {
    auto S = build_selfsimilar(0.0, 0.02);
    // Im jump of V^ across 0 is -6 pi alpha in this transform convention.
    CHECK(S.fitted.jump_im == doctest::Approx(-6.0 * pi * 0.02).epsilon(1e-3));
    CHECK(S.fitted.alpha_fit == doctest::Approx(0.02).epsilon(1e-3));
    CHECK(std::abs(S.fitted.re_jump) < 1e-6);
}

TEST_CASE("synthetic asymptotic fit and window rejection") {
    auto g = FrequencyGrid::uniform(8000, 0.01);
    auto p = Profile::sample(g, 1.0, [](double eta) {
        const double e = std::abs(eta);
        cd v = 0.1 * std::polar(1.0, 0.3 * std::log(std::max(e, 1e-300)));
        if (e < 1.0) v = 0.1;
        return eta < 0 ? std::conj(v) : v;
    });
    FitOptions fo;
    fo.eta_lo = 3.0;
    auto f = fit_asymptotics(p, fo);
    CHECK(std::abs(f.A) == doctest::Approx(0.1).epsilon(1e-6));
    CHECK(f.a == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(std::abs(f.B) < 1e-6);

    auto narrow = FrequencyGrid::uniform(600, 0.01);
    auto q = Profile::sample(narrow, 1.0, [](double) { return cd{0.1, 0.0}; });
    CHECK_THROWS_AS(fit_asymptotics(q, fo), Error);
}
