#include "mkdv/norms.hpp"

#include <algorithm>
#include <cmath>

#include "mkdv/interp.hpp"

namespace mkdv {

double l2_nodes(const FrequencyGrid& g, const cvec& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s * g.spacing());
}

ENormParts e_norm_parts(const Profile& p) {
    if (!(p.time > 0.0)) fail(ErrorKind::invalid_argument, "e_norm: t must be > 0 (weight t^{-1/6} undefined)");
    ENormParts r;
    r.sup = p.sup();
    r.deriv_l2 = l2_nodes(p.grid, half_grid_derivative(p.grid, p.values));
    r.weight = std::pow(p.time, -1.0 / 6.0);
    return r;
}

double e_norm(const Profile& p) { return e_norm_parts(p).total(); }

namespace {

void check_tail(const cvec& v, double tol, const char* what) {
    double sup = 0.0;
    for (const auto& x : v) sup = std::max(sup, std::abs(x));
    if (sup == 0.0) return;
    const double edge = std::max(std::abs(v.front()), std::abs(v.back()));
    if (edge > tol * sup)
        fail(ErrorKind::precondition,
             std::string("z_norm: ") + what + " does not decay at the grid edge (ratio " + std::to_string(edge / sup) + ")",
             edge / sup);
}

ZNormComponents components(const SpaceField& z, const Profile& zhat, const cvec& dzhat) {
    ZNormComponents c;
    for (const auto& v : z.values) c.l1_space += std::abs(v);
    c.l1_space *= z.grid.dx();
    const double h = zhat.grid.spacing();
    for (std::size_t k = 0; k < zhat.size(); ++k) {
        const double xi = zhat.grid.node(k);
        c.l1_weighted += (1.0 + xi * xi) * std::abs(zhat.values[k]);
        c.l1_deriv += std::sqrt(1.0 + xi * xi) * std::abs(dzhat[k]);
    }
    c.l1_weighted *= h;
    c.l1_deriv *= h;
    return c;
}

}  // namespace

ZNormComponents z_norm_components(const SpaceField& z, const Profile& zhat, double tail_tol) {
    check_tail(z.values, tail_tol, "z");
    check_tail(zhat.values, tail_tol, "z^");
    return components(z, zhat, half_grid_derivative(zhat.grid, zhat.values));
}

double z_norm(const Perturbation& z) {
    if (z.space.values.empty()) return 0.0;
    check_tail(z.space.values, 1e-8, "z");
    check_tail(z.freq.values, 1e-8, "z^");
    const cvec d = z.dhat_fn ? z.dhat_on(z.freq.grid) : half_grid_derivative(z.freq.grid, z.freq.values);
    return components(z.space, z.freq, d).total();
}

XnParts xn_norm_parts(const Profile& p, const CutoffFamily& cutoff, double n) {
    require(n > 0.0, ErrorKind::invalid_argument, "xn_norm: n must be positive");
    const cvec d = half_grid_derivative(p.grid, p.values);
    XnParts r;
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double lc = cutoff.log_chi_n(p.grid.node(k), n);
        if (-lc > 700.0)
            fail(ErrorKind::precondition, "xn_norm: chi_n^{-1} overflows on the grid (max frequency too large for n)");
        r.sup_weighted = std::max(r.sup_weighted, std::abs(p.values[k]) * std::exp(-lc));
        s += std::norm(d[k]) * std::exp(-lc);
    }
    r.deriv_weighted = std::sqrt(s * p.grid.spacing());
    return r;
}

double xn_norm(const Profile& p, const CutoffFamily& cutoff, double n) { return xn_norm_parts(p, cutoff, n).total(); }

double pointwise_decay_ratio(const SpaceField& f, DecayGauge gauge, double reference_norm) {
    require(reference_norm > 0.0, ErrorKind::invalid_argument, "pointwise_decay_ratio: reference norm must be > 0");
    require(f.time > 0.0, ErrorKind::invalid_argument, "pointwise_decay_ratio: t must be > 0");
    const double t3 = std::cbrt(f.time);
    double r = 0.0;
    for (std::size_t j = 0; j < f.grid.size(); ++j) {
        const double y = f.grid.node(j) / t3;
        double w = t3 * std::pow(1.0 + y * y, 0.125);
        if (gauge == DecayGauge::z_type) w = std::max(1.0, w);
        r = std::max(r, std::abs(f.values[j]) * w);
    }
    return r / reference_norm;
}

}  // namespace mkdv
