#include "mkdv/oscillatory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>

#include "mkdv/fourier.hpp"
#include "mkdv/interp.hpp"
#include "mkdv/norms.hpp"

namespace mkdv {

namespace {

using std::numbers::pi;

// Gauss-Legendre 6 (value) and 4 (error estimate) on [-1, 1].
constexpr std::array<double, 6> kX6{-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                                    0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
constexpr std::array<double, 6> kW6{0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                                    0.4679139345726910, 0.3607615730481386, 0.1713244923791704};
constexpr std::array<double, 4> kX4{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                    0.8611363115940526};
constexpr std::array<double, 4> kW4{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                    0.3478548451374538};

constexpr double kMaxPanel = 0.25;

struct Budget {
    std::size_t used = 0, limit = 0;
    void spend(std::size_t n) {
        used += n;
        if (used > limit)
            fail(ErrorKind::quadrature, "oscillatory quadrature exceeded its evaluation budget (unresolved oscillation)",
                 INFINITY);
    }
};

// Splits [a, b] by bisection until each panel is no wider than
// frac * 2pi / (rate(a, b) + 1) and kMaxPanel.
template <class Rate>
void panels(double a, double b, double frac, const Rate& rate, std::vector<std::pair<double, double>>& out,
            int depth = 0) {
    const double allowed = std::min(kMaxPanel, frac * 2.0 * pi / (rate(a, b) + 1.0));
    if (b - a <= allowed || depth > 60) {
        out.emplace_back(a, b);
        return;
    }
    const double m = 0.5 * (a + b);
    panels(a, m, frac, rate, out, depth + 1);
    panels(m, b, frac, rate, out, depth + 1);
}

std::vector<double> sorted_points(std::vector<double> v, double a, double b) {
    v.push_back(a);
    v.push_back(b);
    std::vector<double> out;
    for (double x : v)
        if (x >= a && x <= b) out.push_back(x);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double p, double q) { return std::abs(p - q) < 1e-14; }),
              out.end());
    return out;
}

struct QuadResult {
    cd value{};
    double err = 0.0;
    double scale = 0.0;  // integral of |integrand|
};

struct Sample {
    cd v{};
    double e = 0.0;  // error already carried by the sample (nested quadrature)
};

// 1D panel quadrature of fn over [a, b] with breakpoints and phase-rate bound
// `rate`. fn returns a Sample; carried errors are summed with the GL-6 weights.
template <class F, class Rate>
QuadResult integrate_1d(const F& fn, double a, double b, const std::vector<double>& breaks, double frac,
                        const Rate& rate, Budget& budget) {
    QuadResult r;
    if (!(b > a)) return r;
    const auto pts = sorted_points(breaks, a, b);
    std::vector<std::pair<double, double>> ps;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) panels(pts[i], pts[i + 1], frac, rate, ps);
    budget.spend(ps.size() * 10);
    for (auto [pa, pb] : ps) {
        const double c = 0.5 * (pa + pb), hw = 0.5 * (pb - pa);
        cd s6{}, s4{};
        double sa = 0.0, se = 0.0;
        for (int q = 0; q < 6; ++q) {
            const Sample v = fn(c + hw * kX6[q]);
            s6 += kW6[q] * v.v;
            sa += kW6[q] * std::abs(v.v);
            se += kW6[q] * v.e;
        }
        for (int q = 0; q < 4; ++q) s4 += kW4[q] * fn(c + hw * kX4[q]).v;
        r.value += hw * s6;
        r.err += hw * (std::abs(s6 - s4) + se);
        r.scale += hw * sa;
    }
    return r;
}

double max_abs_on(double a, double b) { return std::max(std::abs(a), std::abs(b)); }

}  // namespace

double CubicPhase::expanded(double xi, double xi1, double xi2) noexcept {
    const double xi3 = xi - xi1 - xi2;
    return xi * xi * xi - xi1 * xi1 * xi1 - xi2 * xi2 * xi2 - xi3 * xi3 * xi3;
}

double CubicPhase::factored(double xi, double xi1, double xi2) noexcept {
    const double xi3 = xi - xi1 - xi2;
    return 3.0 * (xi - xi1) * (xi - xi2) * (xi - xi3);
}

const char* to_string(NMethod m) noexcept {
    switch (m) {
        case NMethod::direct: return "direct";
        case NMethod::leading: return "leading";
        case NMethod::hybrid: return "hybrid";
        case NMethod::spectral: return "spectral";
    }
    return "?";
}

ProfileFn ProfileFn::from_profile(const Profile& p, double support_tol) {
    auto sp = std::make_shared<Profile>(p);
    ProfileFn f;
    f.sup = p.sup();
    f.breaks = {0.0};
    const double h = p.grid.spacing();
    std::size_t first = p.size(), last = 0;
    for (std::size_t k = 0; k < p.size(); ++k)
        if (std::abs(p.values[k]) > support_tol * f.sup) {
            first = std::min(first, k);
            last = k;
        }
    if (first > last || f.sup == 0.0) {
        f.sup = 0.0;
        f.eval = [](double) { return cd{}; };
        return f;
    }
    f.lo = std::max(-p.grid.max_frequency(), p.grid.node(first) - 0.5 * h);
    f.hi = std::min(p.grid.max_frequency(), p.grid.node(last) + 0.5 * h);
    const double lo = f.lo, hi = f.hi;
    f.eval = [sp, lo, hi](double x) {
        if (x < lo || x > hi) return cd{};
        return interp_half_grid(sp->grid, sp->values, x);
    };
    f.dom_lo = -p.grid.max_frequency();
    f.dom_hi = p.grid.max_frequency();
    return f;
}

ProfileFn ProfileFn::from_function(std::function<cd(double)> fn, double lo, double hi, rvec breaks, double sup) {
    ProfileFn f;
    f.lo = lo;
    f.hi = hi;
    f.dom_lo = lo;
    f.dom_hi = hi;
    f.breaks = std::move(breaks);
    if (sup <= 0.0)
        for (int i = 0; i <= 4000; ++i) sup = std::max(sup, std::abs(fn(lo + (hi - lo) * i / 4000.0)));
    f.sup = sup;
    f.eval = [fn, lo, hi](double x) { return (x < lo || x > hi) ? cd{} : fn(x); };
    return f;
}

NEvaluation trilinear_N_direct(const ProfileFn& f, const ProfileFn& g, const ProfileFn& h, double t, double xi,
                               const QuadratureOptions& opt) {
    require(t >= 0.0, ErrorKind::invalid_argument, "trilinear_N_direct: t must be >= 0");
    NEvaluation out;
    out.method = NMethod::direct;
    if (f.zero() || g.zero() || h.zero() || xi == 0.0) return out;
    Budget budget{0, opt.max_evaluations};

    const double A = std::max(f.lo, xi - g.hi - h.hi), B = std::min(f.hi, xi - g.lo - h.lo);
    if (!(B > A)) return out;
    std::vector<double> gpts{g.lo, g.hi}, hpts{h.lo, h.hi};
    gpts.insert(gpts.end(), g.breaks.begin(), g.breaks.end());
    hpts.insert(hpts.end(), h.breaks.begin(), h.breaks.end());
    std::vector<double> outer_breaks(f.breaks);
    for (double gb : gpts)
        for (double hb : hpts) outer_breaks.push_back(xi - gb - hb);
    const double H = std::max(std::abs(h.lo), std::abs(h.hi));

    auto inner = [&](double x1) -> QuadResult {
        const double a = std::max(g.lo, xi - x1 - h.hi), b = std::min(g.hi, xi - x1 - h.lo);
        if (!(b > a)) return {};
        std::vector<double> br(g.breaks);
        for (double hb : h.breaks) br.push_back(xi - x1 - hb);
        // d Phi / d xi2 = 3 (xi - xi1)(xi - xi1 - 2 xi2), linear in xi2
        auto rate = [&](double p, double q) {
            return t * 3.0 * std::abs(xi - x1) * max_abs_on(xi - x1 - 2.0 * p, xi - x1 - 2.0 * q);
        };
        auto integrand = [&](double x2) {
            return Sample{g.eval(x2) * h.eval(xi - x1 - x2) * std::polar(1.0, t * CubicPhase::factored(xi, x1, x2))};
        };
        return integrate_1d(integrand, a, b, br, opt.panel_fraction, rate, budget);
    };
    // d Phi / d xi1 = 3 (xi3^2 - xi1^2); bounded via |xi3| <= H
    auto outer_rate = [&](double p, double q) {
        const double m1 = max_abs_on(p, q);
        return t * 3.0 * std::max(m1 * m1, H * H);
    };
    auto outer_integrand = [&](double x1) {
        const cd fv = f.eval(x1);
        if (fv == cd{}) return Sample{};
        const QuadResult in = inner(x1);
        return Sample{fv * in.value, std::abs(fv) * in.err};
    };
    QuadResult r = integrate_1d(outer_integrand, A, B, outer_breaks, opt.panel_fraction, outer_rate, budget);
    const double pref = std::abs(xi) / (4.0 * pi * pi);
    out.value = cd{0.0, xi / (4.0 * pi * pi)} * r.value;
    out.estimated_error = pref * r.err;
    const double scale = pref * std::max(r.scale, f.sup * g.sup * h.sup * 1e-300);
    if (out.estimated_error > opt.rel_tol * scale + opt.abs_tol)
        fail(ErrorKind::quadrature,
             "trilinear_N_direct: unresolved oscillation at xi = " + std::to_string(xi) + " (estimate " +
                 std::to_string(out.estimated_error) + ")",
             out.estimated_error);
    return out;
}

NEvaluation trilinear_N_direct(const Profile& f, const Profile& g, const Profile& h, double t, double xi,
                               const QuadratureOptions& opt) {
    require(f.grid == g.grid && g.grid == h.grid, ErrorKind::invalid_argument,
            "trilinear_N_direct: profiles must share a grid");
    return trilinear_N_direct(ProfileFn::from_profile(f), ProfileFn::from_profile(g), ProfileFn::from_profile(h), t,
                              xi, opt);
}

cvec N_spectral(const ProfileFn& f, const ProfileFn& g, const ProfileFn& h, double t, const rvec& xis,
                const SpectralNOptions& opt) {
    require(t >= 0.0, ErrorKind::invalid_argument, "N_spectral: t must be >= 0");
    cvec out(xis.size());
    if (f.zero() || g.zero() || h.zero()) return out;
    double xs = 0.0;
    for (const ProfileFn* p : {&f, &g, &h}) xs = std::max({xs, std::abs(p->lo), std::abs(p->hi)});
    double xe = 0.0;
    for (double x : xis) xe = std::max(xe, std::abs(x));
    // Box: dispersed fields live in |x| <~ 3 t xs^2; spacing resolves the product band.
    const double X = 3.0 * t * xs * xs + opt.box_margin;
    const double hh = pi / X;
    auto m = std::size_t(opt.oversample * (2.0 * xs + 3.0 * xs + xe) / hh) + 16;
    m = good_fft_size(m);
    if (m > opt.max_nodes) fail(ErrorKind::aliasing, "N_spectral: grid needs " + std::to_string(m) + " nodes");
    const FrequencyGrid grid = FrequencyGrid::uniform(m, hh);
    SpectralTransform T(m, hh, true);
    auto field = [&](const ProfileFn& p) {
        cvec v(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double z = grid.node(k);
            v[k] = std::polar(1.0, -t * z * z * z) * p.eval(z);
        }
        T.to_space(v.data(), v.data());
        return v;
    };
    cvec prod = field(f);
    {
        const cvec b = (&g == &f) ? prod : field(g);
        const cvec c = (&h == &f) ? (&g == &f ? b : field(h)) : (&h == &g ? b : field(h));
        for (std::size_t j = 0; j < m; ++j) prod[j] *= b[j] * c[j];
    }
    const double dx = T.dx();
    const double x0 = -0.5 * double(m) * dx;
    for (std::size_t q = 0; q < xis.size(); ++q) {
        const double z = xis[q];
        cd acc{};
        cd w = std::polar(1.0, x0 * z);
        const cd step = std::polar(1.0, dx * z);
        for (std::size_t j = 0; j < m; ++j) {
            if ((j & 1023) == 0) w = std::polar(1.0, (x0 + double(j) * dx) * z);
            acc += prod[j] * w;
            w *= step;
        }
        out[q] = cd{0.0, z} * std::polar(1.0, t * z * z * z) * acc * dx;
    }
    return out;
}

cvec N_spectral(const Profile& f, const Profile& g, const Profile& h, double t, const rvec& xis,
                const SpectralNOptions& opt) {
    const ProfileFn F = ProfileFn::from_profile(f);
    if (&f == &g && &g == &h) return N_spectral(F, F, F, t, xis, opt);
    return N_spectral(F, ProfileFn::from_profile(g), ProfileFn::from_profile(h), t, xis, opt);
}

cd leading_term_N(const ProfileFn& u, double t, double xi, bool real_field) {
    if (xi == 0.0 || u.zero()) return {};
    if (xi < 0.0) {
        if (!real_field)
            fail(ErrorKind::invalid_argument, "leading_term_N: xi < 0 only for profiles of real fields");
        return std::conj(leading_term_N(u, t, -xi, true));
    }
    if (xi > u.dom_hi || xi / 3.0 > u.dom_hi)
        fail(ErrorKind::invalid_argument, "leading_term_N: xi outside the profile's grid");
    const double x3t = xi * xi * xi * t;
    const cd a = u.eval(xi), b = u.eval(xi / 3.0);
    const cd bracket = cd{0.0, 1.0} * std::norm(a) * a + std::polar(1.0 / std::sqrt(3.0), 8.0 * x3t / 9.0) * b * b * b;
    return xi * xi * xi / (4.0 * pi * std::sqrt(1.0 + x3t * x3t)) * bracket;
}

cd leading_term_N(const Profile& u, double t, double xi, bool real_field) {
    return leading_term_N(ProfileFn::from_profile(u, 0.0), t, xi, real_field);
}

double remainder_gauge_value(cd n_exact, cd n_lead, double t, double xi, double e_norm) {
    require(e_norm > 0.0, ErrorKind::invalid_argument, "remainder gauge: zero norm");
    const double s = std::abs(xi * xi * xi) * t;
    return std::abs(n_exact - n_lead) * std::pow(s, 5.0 / 6.0) * std::pow(1.0 + s * s, 0.125) /
           (std::abs(xi * xi * xi) * e_norm * e_norm * e_norm);
}

NEvaluation N_hybrid(const ProfileFn& u, double t, double xi, const HybridPolicy& pol, const QuadratureOptions& opt) {
    const double s = std::abs(xi * xi * xi) * t;
    if (s > pol.threshold) {
        NEvaluation e;
        e.method = NMethod::hybrid;
        e.value = leading_term_N(u, t, xi);
        const double E = pol.e_norm;
        e.estimated_error = pol.remainder_bound * std::abs(xi * xi * xi) * E * E * E /
                            (std::pow(s, 5.0 / 6.0) * std::pow(1.0 + s * s, 0.125));
        return e;
    }
    NEvaluation e = trilinear_N_direct(u, u, u, t, xi, opt);
    e.method = NMethod::hybrid;
    return e;
}

double remainder_gauge(const Profile& u, double t, const rvec& xi_set, NSource src, const QuadratureOptions& opt) {
    Profile ut = u;
    ut.time = t;
    const double E = e_norm(ut);
    if (!(E > 0.0)) fail(ErrorKind::invalid_argument, "remainder_gauge: zero E-norm");
    const ProfileFn F = ProfileFn::from_profile(u);
    cvec n(xi_set.size());
    if (src == NSource::spectral) {
        n = N_spectral(F, F, F, t, xi_set);
    } else {
        for (std::size_t i = 0; i < xi_set.size(); ++i) n[i] = trilinear_N_direct(F, F, F, t, xi_set[i], opt).value;
    }
    double g = 0.0;
    for (std::size_t i = 0; i < xi_set.size(); ++i)
        g = std::max(g, remainder_gauge_value(n[i], leading_term_N(F, t, xi_set[i]), t, xi_set[i], E));
    return g;
}

NEvaluation kernel_K(const ProfileFn& S, double sigma, const QuadratureOptions& opt) {
    NEvaluation out;
    out.method = NMethod::direct;
    if (S.zero()) return out;
    Budget budget{0, opt.max_evaluations};
    const double a = std::max(2.0 * S.lo - sigma, sigma - 2.0 * S.hi);
    const double b = std::min(2.0 * S.hi - sigma, sigma - 2.0 * S.lo);
    std::vector<double> br{0.0};
    for (double p : S.breaks) {
        br.push_back(2.0 * p - sigma);
        br.push_back(sigma - 2.0 * p);
    }
    auto rate = [&](double p, double q) { return 1.5 * std::abs(sigma) * max_abs_on(p, q); };
    auto integrand = [&](double mu) {
        return Sample{std::polar(1.0, 0.75 * sigma * mu * mu) * S.eval(0.5 * (sigma + mu)) * S.eval(0.5 * (sigma - mu))};
    };
    QuadResult r = integrate_1d(integrand, a, b, br, opt.panel_fraction, rate, budget);
    out.value = r.value;
    out.estimated_error = r.err;
    if (r.err > opt.rel_tol * r.scale + opt.abs_tol)
        fail(ErrorKind::quadrature, "kernel_K: unresolved oscillation at sigma = " + std::to_string(sigma), r.err);
    return out;
}

NEvaluation kernel_K(const Profile& S, double sigma, const QuadratureOptions& opt) {
    return kernel_K(ProfileFn::from_profile(S), sigma, opt);
}

double z_interaction_gauge(const Perturbation& z, const Profile& v, double t, ZPattern pattern, const rvec& xis) {
    require(t > 0.0 && t <= 1.0, ErrorKind::invalid_argument, "z_interaction_gauge: t must lie in (0, 1]");
    const double Z = z.space.values.empty() ? 0.0 : z_norm(z);
    if (Z == 0.0) return 0.0;
    Profile vt = v;
    vt.time = t;
    const double E = pattern == ZPattern::zzz ? 1.0 : e_norm(vt);
    if (!(E > 0.0)) fail(ErrorKind::invalid_argument, "z_interaction_gauge: zero E-norm of v");
    const FrequencyGrid& zg = z.freq.grid;
    ProfileFn zf = z.hat_fn ? ProfileFn::from_function(z.hat_fn, -zg.max_frequency(), zg.max_frequency(), {})
                            : ProfileFn::from_profile(z.freq);
    if (z.hat_fn) {
        // tighten the support to where z^ is visible
        double lim = zg.max_frequency();
        while (lim > 1.0 && std::abs(z.hat_fn(lim)) < 1e-14 * zf.sup && std::abs(z.hat_fn(-lim)) < 1e-14 * zf.sup)
            lim *= 0.97;
        zf = ProfileFn::from_function(z.hat_fn, -lim / 0.97, lim / 0.97, {}, zf.sup);
    }
    const ProfileFn vf = ProfileFn::from_profile(v);
    cvec n;
    double w = 1.0;
    switch (pattern) {
        case ZPattern::zvv:
            n = N_spectral(zf, vf, vf, t, xis);
            w = std::pow(t, 8.0 / 9.0) / (Z * E * E);
            break;
        case ZPattern::zzv:
            n = N_spectral(zf, zf, vf, t, xis);
            w = std::pow(t, 2.0 / 3.0) / (Z * Z * E);
            break;
        case ZPattern::zzz:
            n = N_spectral(zf, zf, zf, t, xis);
            w = 1.0 / (Z * Z * Z);
            break;
    }
    double s = 0.0;
    for (const auto& x : n) s = std::max(s, std::abs(x));
    return s * w;
}

}  // namespace mkdv
