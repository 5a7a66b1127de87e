#include <doctest.h>

#include <cmath>
#include <memory>

#include "mkdv/evolution.hpp"
#include "mkdv/norms.hpp"
#include "mkdv/oscillatory.hpp"

using namespace mkdv;

namespace {
std::shared_ptr<const SelfSimilarProfile> profile() {
    static auto S = std::make_shared<const SelfSimilarProfile>(build_selfsimilar(0.05, 0.0));
    return S;
}
Perturbation pert(double delta) {
    auto g = FrequencyGrid::uniform(8192, 0.0025);
    const double a = delta / z_norm(gaussian_perturbation(1.0, 1.0, g));
    return gaussian_perturbation(a, 1.0, g);
}
}  // namespace

TEST_CASE("graded mesh") {
    GradedMesh m{2.0, 10, 3.0};
    auto t = m.nodes();
    CHECK(t.size() == 11);
    CHECK(t[0] == 0.0);
    CHECK(t[10] == 2.0);
    CHECK(t[5] == doctest::Approx(0.25));
}

TEST_CASE("remainder RHS matches the trilinear expansion evaluated independently") {
    auto S = profile();
    auto z = pert(0.05);
    EvolutionOptions o;
    o.n = 4.0;
    const double t = 0.05;
    EvolutionEngine eng(S, z, o, 0.1);
    auto G = eng.grid_for(t);
    const cvec w0(G.size(), 0.0);
    const cvec r = eng.rhs(t, w0);
    o.expanded = false;
    EvolutionEngine direct(S, z, o, 0.1);
    const cvec r2 = direct.rhs(t, w0);
    double scale = 0.0, diff = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        scale = std::max(scale, std::abs(r[k]));
        diff = std::max(diff, std::abs(r[k] - r2[k]));
    }
    CHECK(diff < 1e-12 * scale);

    CutoffFamily cf;
    const double s3 = std::cbrt(t), B = cf.support_radius(o.n, 1e-9) / s3;
    auto Sf = ProfileFn::from_function([&](double xi) { return cf.chi_n(s3 * xi, o.n) * S->eval(s3 * xi); }, -B, B, {0.0});
    auto zf = ProfileFn::from_function([&](double xi) { return z.hat_fn(xi); }, -7.0, 7.0, {});
    for (std::size_t k : {G.first_positive() + 40, G.first_positive() + 150, G.first_positive() / 2}) {
        const double xi = G.node(k);
        const cd expect = -cf.chi_n(xi, o.n) * (N_spectral(zf, zf, zf, t, {xi})[0] + 3.0 * N_spectral(Sf, Sf, zf, t, {xi})[0] +
                                                3.0 * N_spectral(Sf, zf, zf, t, {xi})[0]);
        CHECK(std::abs(r[k] - expect) < 1e-9 * scale);
    }
}

TEST_CASE("zero perturbation keeps w identically zero") {
    auto g = FrequencyGrid::uniform(1024, 0.02);
    EvolutionOptions o;
    o.n = 4.0;
    GradedMesh m{0.05, 12, 3.0};
    auto st = integrate_w(profile(), zero_perturbation(g), o, m);
    for (auto v : st.w) CHECK(v == cd{});
    for (auto& r : st.history.records) CHECK(r.e_norm == 0.0);
    auto rep = bootstrap_report(st.history, 0.05, 1e-3 * 0.05, 0.05, 1);
    for (auto& c : rep.rates) CHECK(c.trivial);
}

TEST_CASE("small run: Hermitian, zero frequency, energy identity") {
    auto S = profile();
    auto z = pert(0.05);
    EvolutionOptions o;
    o.n = 4.0;
    o.rtol = 1e-9;
    GradedMesh m{0.05, 40, 3.0};
    auto st = integrate_w(S, z, o, m);
    const auto& last = st.history.records.back();
    CHECK(last.hermitian < 1e-14 * last.sup);
    CHECK(last.zero_freq < 10.0 * st.grid.spacing() * last.sup);
    CHECK(last.e_norm > 0.0);

    // d/dt int |J|^2 / chi_n by differences against the three-term identity
    const double d = 0.002;
    double E[2];
    EnergyBreakdown mid;
    for (int i = 0; i < 2; ++i) {
        GradedMesh mm{0.05 + (2 * i - 1) * d, 40, 3.0};
        auto s = integrate_w(S, z, o, mm);
        EvolutionEngine eng(S, z, o, mm.t_end);
        E[i] = eng.energy(s.t, s.w).energy;
    }
    EvolutionEngine eng(S, z, o, 0.05);
    mid = eng.energy(st.t, st.w);
    CHECK(mid.energy == doctest::Approx(last.iw_weighted * last.iw_weighted).epsilon(1e-10));
    CHECK((E[1] - E[0]) / (2 * d) == doctest::Approx(mid.total()).epsilon(0.05));
}

TEST_CASE("regrid to a doubled box is exact for a contained field") {
    auto S = profile();
    auto z = pert(0.05);
    EvolutionOptions o;
    o.n = 4.0;
    EvolutionEngine eng(S, z, o, 1.0);
    const double t = 1.0;
    auto to = eng.grid_for(t);
    auto from = FrequencyGrid::uniform(2 * std::size_t(std::ceil(to.max_frequency() / (2 * to.spacing()))),
                                       2 * to.spacing());
    // w^ of a bump centred at x = -30: e^{-30 i xi} e^{-xi^2}; w~ = e^{i t xi^3} w^.
    auto f = [&](double xi) { return std::polar(std::exp(-xi * xi), -30.0 * xi + t * xi * xi * xi); };
    cvec w(from.size());
    for (std::size_t k = 0; k < from.size(); ++k) w[k] = f(from.node(k));
    auto out = eng.regrid(t, w, from, to);
    double err = 0.0;
    for (std::size_t k = 0; k < to.size(); ++k) err = std::max(err, std::abs(out[k] - f(to.node(k))));
    CHECK(err < 1e-10);
}

TEST_CASE("I on a linear profile reduces to -i e^{-it xi^3} dz^") {
    auto g = FrequencyGrid::uniform(2048, 0.01);
    auto z = gaussian_perturbation(0.3, 1.0, g);
    Profile p(g, z.freq.values, 0.7);
    auto I = apply_I(p, cvec(g.size(), 0.0));
    const cvec dz = z.dhat_on(g);
    double err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k)
        err = std::max(err, std::abs(I[k] - cd{0.0, -1.0} * std::polar(1.0, -0.7 * std::pow(g.node(k), 3)) * dz[k]));
    CHECK(err < 1e-5);
}
