#include "mkdv/evolution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "mkdv/fourier.hpp"
#include "mkdv/interp.hpp"
#include "mkdv/norms.hpp"

namespace mkdv {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kExtentLevel = 1e-6;   // chi_n level used to size boxes
constexpr double kProductLevel = 1e-9;  // S~_n is dropped below this chi_n level

double cube(double x) { return x * x * x; }

// Last |x| (or |xi|) where |v| exceeds rel * sup.
template <class G>
double extent_of(const G& g, const cvec& v, double rel) {
    double s = 0.0;
    for (const auto& a : v) s = std::max(s, std::abs(a));
    if (!(s > 0.0)) return 0.0;
    double e = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k)
        if (std::abs(v[k]) > rel * s) e = std::max(e, std::abs(g.node(k)));
    return e;
}

struct Epoch {
    double t_lo = 0.0, t_hi = 0.0;
    double L = 0.0;
    FrequencyGrid grid;
};

struct ComputeGrid {
    std::unique_ptr<SpectralTransform> T;
    FrequencyGrid g;
    cvec zhat;     // z^ on the compute nodes
    cvec dzhat;    // d_xi z^
};

}  // namespace

rvec GradedMesh::nodes() const {
    require(t_end > 0.0 && K >= 2 && gamma >= 1.0, ErrorKind::invalid_argument, "graded mesh: bad parameters");
    rvec t(K + 1);
    for (std::size_t k = 0; k <= K; ++k) t[k] = t_end * std::pow(double(k) / double(K), gamma);
    t[K] = t_end;
    return t;
}

std::vector<std::pair<double, double>> DecaySeries::column(double DecayRecord::*field, double t_lo,
                                                           double t_hi) const {
    std::vector<std::pair<double, double>> out;
    for (const auto& r : records)
        if (r.t >= t_lo * (1 - 1e-12) && r.t <= t_hi * (1 + 1e-12) && r.t > 0.0) out.emplace_back(r.t, r.*field);
    return out;
}

struct EvolutionEngine::Impl {
    std::shared_ptr<const SelfSimilarProfile> S;
    Perturbation z;
    bool z_zero = true;
    double n = 0.0, n_grid = 0.0;
    double B_store = 0.0;     // storage band (shared across a Cauchy family)
    double B_w = 0.0;         // active band of this n
    double B_S_eta = 0.0;     // S~_n kept for |eta| <= B_S_eta
    double B_ext = 0.0;       // band used to size the box
    double B_z = 0.0;
    double X_z0 = 0.0;        // |x| extent of z
    double margin = 0.0, safety = 0.0;
    double cut = 0.0;         // x beyond cut belongs to the left, wrapped copy
    std::vector<Epoch> epochs;  // increasing in time
    mutable std::map<std::pair<std::size_t, double>, std::shared_ptr<const ComputeGrid>> cache;
    mutable std::size_t rhs_evals = 0;
    mutable std::size_t max_nodes = 0;
    CutoffFamily cutoff;

    double right_S(double t) const { return S->trivial() ? 0.0 : 20.0 * std::cbrt(t); }
    double box_required(double t) const {
        const double xs = S->trivial() ? 0.0 : 3.0 * std::cbrt(t) * B_ext * B_ext;
        const double xv = std::max(3.0 * t * B_ext * B_ext, 3.0 * t * B_z * B_z + X_z0);
        const double need = safety * (std::max(xs, xv) + X_z0 + right_S(t)) + 2.0 * margin;
        return std::max(need, 2.0 * (cut + margin));
    }

    const Epoch& epoch_of(double t) const {
        for (const auto& e : epochs)
            if (t <= e.t_hi * (1 + 1e-13)) return e;
        return epochs.back();
    }

    // Shared ownership: entries may be evicted while a caller still uses one.
    std::shared_ptr<const ComputeGrid> compute_grid(std::size_t m, double h) const {
        auto key = std::make_pair(m, h);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        if (cache.size() > 6) cache.clear();
        auto cgp = std::make_shared<ComputeGrid>();
        ComputeGrid& cg = *cgp;
        cg.T = std::make_unique<SpectralTransform>(m, h, true);
        cg.g = FrequencyGrid::uniform(m, h);
        if (!z_zero) {
            cg.zhat = z.hat_on(cg.g);
            cg.dzhat = z.dhat_on(cg.g);
            for (std::size_t k = 0; k < m; ++k)
                if (std::abs(cg.g.node(k)) > B_z) cg.zhat[k] = cg.dzhat[k] = 0.0;
        }
        max_nodes = std::max(max_nodes, m);
        cache.emplace(key, cgp);
        return cgp;
    }

    // Compute grid for products at time t on the epoch grid g.
    std::shared_ptr<const ComputeGrid> product_grid(double t, const FrequencyGrid& g) const {
        const double bs = S->trivial() ? 0.0 : B_S_eta / std::cbrt(t);
        const double bv = std::max(B_w, z_zero ? 0.0 : B_z);
        const double band = std::max({2.0 * bs + bv, bs + 2.0 * bv, 3.0 * bv});
        const double K = 0.5 * (band + B_store);
        const auto m = good_fft_size(std::max<std::size_t>(std::size_t(2.0 * std::ceil(K / g.spacing())) + 4,
                                                           g.size()));
        return compute_grid(m, g.spacing());
    }

    double x_true(double x, double L) const { return x <= cut ? x : x - L; }

    struct Fields {
        std::shared_ptr<const ComputeGrid> cg;
        std::size_t off = 0;
        cvec S, z, w;   // physical, on the compute grid
        cvec Dhat;      // F(u^3 - S^3) on storage nodes
    };

    Fields fields(double t, const cvec& w, const Epoch& ep, bool expanded) const {
        const FrequencyGrid& g = ep.grid;
        require(w.size() == g.size(), ErrorKind::precondition, "evolution: w is not on the epoch grid");
        Fields f;
        f.cg = product_grid(t, g);
        const ComputeGrid& cg = *f.cg;
        const std::size_t m = cg.g.size();
        f.off = (m - g.size()) / 2;
        const double s3 = std::cbrt(t);
        cvec ph(m);
        for (std::size_t k = 0; k < m; ++k) ph[k] = std::polar(1.0, -t * cube(cg.g.node(k)));
        f.S.assign(m, 0.0);
        f.z.assign(m, 0.0);
        f.w.assign(m, 0.0);
        if (!S->trivial()) {
            for (std::size_t k = 0; k < m; ++k) {
                const double eta = s3 * cg.g.node(k);
                if (std::abs(eta) > B_S_eta) continue;
                f.S[k] = cutoff.chi_n(eta, n) * S->eval(eta) * ph[k];
            }
            cg.T->to_space(f.S.data(), f.S.data());
        }
        if (!z_zero) {
            for (std::size_t k = 0; k < m; ++k) f.z[k] = cg.zhat[k] * ph[k];
            cg.T->to_space(f.z.data(), f.z.data());
        }
        for (std::size_t k = 0; k < g.size(); ++k) f.w[f.off + k] = w[k] * ph[f.off + k];
        cg.T->to_space(f.w.data(), f.w.data());
        cvec D(m);
        for (std::size_t j = 0; j < m; ++j) {
            const double s = f.S[j].real();
            const double v = f.z[j].real() + f.w[j].real();
            f.S[j] = s;
            f.z[j] = f.z[j].real();
            f.w[j] = f.w[j].real();
            D[j] = expanded ? 3.0 * s * s * v + 3.0 * s * v * v + v * v * v : cube(s + v) - cube(s);
        }
        cg.T->to_freq(D.data(), D.data());
        f.Dhat.assign(D.begin() + std::ptrdiff_t(f.off), D.begin() + std::ptrdiff_t(f.off + g.size()));
        return f;
    }

    cvec rhs_from(double t, const FrequencyGrid& g, const cvec& Dhat, double sign) const {
        cvec r(g.size(), 0.0);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double xi = g.node(k);
            if (std::abs(xi) > B_w) continue;
            r[k] = -sign * cutoff.chi_n(xi, n) * cd{0.0, xi} * std::polar(1.0, t * cube(xi)) * Dhat[k];
        }
        return r;
    }

    // F(i x w) on storage nodes, x unwrapped.
    cvec dxi(double t, const cvec& w, const Epoch& ep) const {
        const FrequencyGrid& g = ep.grid;
        const std::size_t m = good_fft_size(g.size() + g.size() / 4 + 4);
        const auto cgp = compute_grid(m, g.spacing());
        const ComputeGrid& cg = *cgp;
        const std::size_t off = (m - g.size()) / 2;
        cvec a(m, 0.0);
        for (std::size_t k = 0; k < g.size(); ++k) a[off + k] = w[k] * std::polar(1.0, -t * cube(g.node(k)));
        cvec what(a.begin() + std::ptrdiff_t(off), a.begin() + std::ptrdiff_t(off + g.size()));
        cg.T->to_space(a.data(), a.data());
        const SpaceGrid xg(m, cg.T->dx());
        const double L = xg.length();
        for (std::size_t j = 0; j < m; ++j) a[j] = cd{0.0, x_true(xg.node(j), L)} * a[j].real();
        cg.T->to_freq(a.data(), a.data());
        cvec d(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double xi = g.node(k);
            d[k] = std::polar(1.0, t * cube(xi)) * (cd{0.0, 3.0 * t * xi * xi} * what[k] + a[off + k]);
        }
        return d;
    }
};

EvolutionEngine::EvolutionEngine(std::shared_ptr<const SelfSimilarProfile> S, Perturbation z, EvolutionOptions opt,
                                 double t_end)
    : impl_(std::make_unique<Impl>()), opt_(opt) {
    require(S != nullptr, ErrorKind::invalid_argument, "evolution: missing profile");
    require(opt.n > 0.0 && t_end > 0.0, ErrorKind::invalid_argument, "evolution: need n > 0 and t_end > 0");
    require(opt.sign == 1.0 || opt.sign == -1.0, ErrorKind::invalid_argument, "evolution: sign must be +-1");
    auto& I = *impl_;
    I.S = std::move(S);
    I.z = std::move(z);
    I.z_zero = !(I.z.freq.sup() > 0.0);
    I.n = opt.n;
    I.n_grid = opt.grid_n > 0.0 ? std::max(opt.grid_n, opt.n) : opt.n;
    I.B_w = cutoff_.support_radius(I.n, opt.band_level);
    I.B_store = cutoff_.support_radius(I.n_grid, opt.band_level);
    I.B_S_eta = cutoff_.support_radius(I.n, kProductLevel);
    I.B_ext = cutoff_.support_radius(I.n_grid, kExtentLevel);
    if (!I.z_zero) {
        I.B_z = extent_of(I.z.freq.grid, I.z.freq.values, 1e-15);
        I.X_z0 = extent_of(I.z.space.grid, I.z.space.values, 1e-15);
    }
    I.margin = opt.box_margin;
    I.safety = opt.box_safety;
    I.cut = I.X_z0 + I.margin;
    band_ = I.B_w;

    // Epochs: boxes halve going back in time while the requirement allows.
    const double L_end = I.box_required(t_end);
    std::vector<Epoch> rev;
    double L = L_end, hi = t_end;
    for (;;) {
        Epoch e;
        e.L = L;
        e.t_hi = hi;
        const double half = 0.5 * L;
        if (half < I.box_required(0.0) * 1.0000001 || rev.size() > 60) {
            e.t_lo = 0.0;
            rev.push_back(e);
            break;
        }
        // largest t with box_required(t) <= half
        double a = 0.0, b = hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (a + b);
            (I.box_required(mid) <= half ? a : b) = mid;
        }
        e.t_lo = a;
        rev.push_back(e);
        L = half;
        hi = a;
        if (!(a > 0.0)) break;
    }
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
        Epoch e = *it;
        const double h = 2.0 * kPi / e.L;
        e.grid = FrequencyGrid::uniform(2 * std::size_t(std::ceil(I.B_store / h)), h);
        I.epochs.push_back(e);
    }
}

EvolutionEngine::~EvolutionEngine() = default;
EvolutionEngine::EvolutionEngine(EvolutionEngine&&) noexcept = default;

FrequencyGrid EvolutionEngine::grid_for(double t) const { return impl_->epoch_of(t).grid; }

std::size_t EvolutionEngine::rhs_count() const noexcept { return impl_->rhs_evals; }
std::size_t EvolutionEngine::max_compute_nodes() const noexcept { return impl_->max_nodes; }

cvec EvolutionEngine::rhs(double t, const cvec& w) const {
    require(t > 0.0, ErrorKind::invalid_argument, "rhs: t must be > 0");
    const auto& I = *impl_;
    const Epoch& ep = I.epoch_of(t);
    ++I.rhs_evals;
    if (I.z_zero) {
        // v = w; with w = 0 the difference vanishes identically.
        bool all_zero = std::all_of(w.begin(), w.end(), [](cd v) { return v == cd{}; });
        if (all_zero) return cvec(ep.grid.size(), 0.0);
    }
    auto f = I.fields(t, w, ep, opt_.expanded);
    return I.rhs_from(t, ep.grid, f.Dhat, opt_.sign);
}

cvec EvolutionEngine::dxi(double t, const cvec& w) const { return impl_->dxi(t, w, impl_->epoch_of(t)); }

cvec EvolutionEngine::iw_hat(double t, const cvec& w, const cvec& dw_dt) const {
    const FrequencyGrid g = grid_for(t);
    const cvec d = dxi(t, w);
    cvec J(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double xi = g.node(k);
        J[k] = cd{0.0, -1.0} * std::polar(1.0, -t * cube(xi)) * (d[k] - (3.0 * t / xi) * dw_dt[k]);
    }
    return J;
}

EnergyBreakdown EvolutionEngine::energy(double t, const cvec& w) const {
    const auto& I = *impl_;
    const Epoch& ep = I.epoch_of(t);
    const FrequencyGrid& g = ep.grid;
    auto f = I.fields(t, w, ep, true);
    const cvec dwdt = I.rhs_from(t, g, f.Dhat, opt_.sign);
    const cvec J = iw_hat(t, w, dwdt);
    const ComputeGrid& cg = *f.cg;
    const std::size_t m = cg.g.size();
    const double s = opt_.sign, h = g.spacing();

    cvec iwx(m, 0.0), izx(m, 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) iwx[f.off + k] = cd{0.0, -g.node(k)} * J[k];
    cg.T->to_space(iwx.data(), iwx.data());
    if (!I.z_zero) {
        for (std::size_t k = 0; k < m; ++k) {
            const double xi = cg.g.node(k);
            izx[k] = -xi * std::polar(1.0, -t * cube(xi)) * cg.dzhat[k];
        }
        cg.T->to_space(izx.data(), izx.data());
    }
    cvec a(m), b(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double u = f.S[j].real() + f.z[j].real() + f.w[j].real();
        a[j] = u * u * iwx[j].real();
        b[j] = u * u * izx[j].real();
    }
    cg.T->to_freq(a.data(), a.data());
    cg.T->to_freq(b.data(), b.data());
    EnergyBreakdown e;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double xi = g.node(k);
        if (std::abs(xi) > I.B_w) continue;
        const cd Jc = std::conj(J[k]);
        e.transport += 6.0 * s * (a[f.off + k] * Jc).real() * h;
        e.source += 6.0 * s * (b[f.off + k] * Jc).real() * h;
        e.source_l2 += std::norm(b[f.off + k]) * h;
        e.commutator += -2.0 * s * (cutoff_.xi_dlog_chi_n(xi, I.n) * f.Dhat[k] * Jc).real() * h;
        e.energy += std::norm(J[k]) / cutoff_.chi_n(xi, I.n) * h;
    }
    e.source_l2 = std::sqrt(e.source_l2);
    return e;
}

cvec EvolutionEngine::regrid(double t, const cvec& w, const FrequencyGrid& from, const FrequencyGrid& to) const {
    (void)t;
    if (from == to) return w;
    const auto& I = *impl_;
    require(w.size() == from.size(), ErrorKind::precondition, "regrid: size mismatch");
    require(std::abs(from.spacing() / to.spacing() - 2.0) < 1e-9, ErrorKind::precondition,
            "regrid: only box doubling is supported");
    // Phases cancel: the profile is regridded as the physical field e^{-it xi^3} w~ would be,
    // and w~ = e^{it xi^3} w^ is linear in w^; sampling commutes with the phase.
    const std::size_t q = good_fft_size(from.size() + 4);
    const auto srcp = I.compute_grid(q, from.spacing());
    const auto dstp = I.compute_grid(2 * q, to.spacing());
    const ComputeGrid &src = *srcp, &dst = *dstp;
    const std::size_t off1 = (q - from.size()) / 2;
    cvec a(q, 0.0);
    for (std::size_t k = 0; k < from.size(); ++k) a[off1 + k] = w[k] * std::polar(1.0, -t * cube(from.node(k)));
    src.T->to_space(a.data(), a.data());
    const SpaceGrid xs(q, src.T->dx());
    const double L = xs.length();
    cvec b(2 * q, 0.0);
    const SpaceGrid xd(2 * q, dst.T->dx());
    for (std::size_t j = 0; j < q; ++j) {
        const double x = xs.node(j);
        const bool wrapped = x > I.cut;
        const double xt = wrapped ? x - L : x;
        const auto jj = std::ptrdiff_t(std::llround(xt / xd.dx() + double(q)));
        if (jj < 0 || jj >= std::ptrdiff_t(2 * q)) continue;
        b[std::size_t(jj)] = wrapped ? -a[j] : a[j];
    }
    dst.T->to_freq(b.data(), b.data());
    const std::size_t off2 = (2 * q - to.size()) / 2;
    require(to.size() <= 2 * q, ErrorKind::precondition, "regrid: target grid too large");
    cvec out(to.size());
    for (std::size_t k = 0; k < to.size(); ++k) out[k] = b[off2 + k] * std::polar(1.0, t * cube(to.node(k)));
    return out;
}

DecayRecord EvolutionEngine::measure(double t, const cvec& w, const cvec& dw_dt) const {
    const auto& I = *impl_;
    const FrequencyGrid g = grid_for(t);
    DecayRecord r;
    r.t = t;
    r.rhs_evals = I.rhs_evals;
    const double h = g.spacing();
    const cvec d = dxi(t, w);
    const cvec J = iw_hat(t, w, dw_dt);
    double dl2 = 0.0, dw2 = 0.0, iw2 = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double xi = g.node(k);
        const double a = std::abs(w[k]);
        r.sup = std::max(r.sup, a);
        r.dt_sup = std::max(r.dt_sup, std::abs(dw_dt[k]));
        dl2 += std::norm(d[k]) * h;
        if (std::abs(xi) > I.B_w) continue;
        const double chi = cutoff_.chi_n(xi, I.n);
        r.sup_weighted = std::max(r.sup_weighted, a / chi);
        dw2 += std::norm(d[k]) / chi * h;
        iw2 += std::norm(J[k]) / chi * h;
    }
    r.deriv_l2 = std::sqrt(dl2);
    r.deriv_weighted = std::sqrt(dw2);
    r.iw_weighted = std::sqrt(iw2);
    r.l2 = l2_nodes(g, w) / std::sqrt(2.0 * kPi);
    r.e_norm = r.sup + std::pow(t, -1.0 / 6.0) * r.deriv_l2;
    r.f_sup = std::pow(t, -1.0 / 9.0) * r.sup_weighted;
    r.f_deriv = std::pow(t, -1.0 / 9.0 - 1.0 / 6.0) * r.deriv_weighted;
    r.zero_freq = std::max(std::abs(w[g.first_positive() - 1]), std::abs(w[g.first_positive()]));
    cvec what(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) what[k] = w[k] * std::polar(1.0, -t * cube(g.node(k)));
    r.hermitian = hermitian_defect(what);
    return r;
}

namespace {

// Dormand-Prince 5(4).
constexpr std::array<double, 7> kC{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr std::array<double, 7> kE{71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200, 22.0 / 525,
                                   -1.0 / 40};

double sup_abs(const cvec& v) {
    double s = 0.0;
    for (const auto& a : v) s = std::max(s, std::abs(a));
    return s;
}

struct Stepper {
    const EvolutionEngine& eng;
    const EvolutionOptions& opt;
    std::size_t steps = 0;

    // Advance (t, w, f = rhs(t, w)) to t_target inside one epoch; dt is carried over.
    void advance(double& t, cvec& w, cvec& f, double t_target, double& dt) {
        std::array<cvec, 7> k;
        const std::size_t m = w.size();
        while (t < t_target * (1 - 1e-14)) {
            require(steps < opt.max_steps, ErrorKind::convergence, "evolution: step budget exhausted");
            dt = std::min(dt, t_target - t);
            k[0] = f;
            cvec y(m);
            for (int s = 1; s < 7; ++s) {
                for (std::size_t i = 0; i < m; ++i) {
                    cd acc = 0.0;
                    for (int q = 0; q < s; ++q) acc += kA[s][q] * k[q][i];
                    y[i] = w[i] + dt * acc;
                }
                k[s] = eng.rhs(t + kC[s] * dt, y);
            }
            // y now holds the 5th-order solution (row 6 of A equals b).
            double err = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                cd e = 0.0;
                for (int q = 0; q < 7; ++q) e += kE[q] * k[q][i];
                err = std::max(err, std::abs(dt * e));
            }
            const double scale = opt.atol + opt.rtol * std::max(sup_abs(w), sup_abs(y));
            const double ratio = err / scale;
            if (ratio <= 1.0 || !(scale > 0.0)) {
                t += dt;
                w = std::move(y);
                f = k[6];
                ++steps;
            }
            const double fac = ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
            dt *= std::clamp(fac, 0.2, 5.0);
            require(std::isfinite(dt) && dt > 0.0, ErrorKind::convergence, "evolution: step size collapsed");
        }
        t = t_target;
    }
};

}  // namespace

EvolutionState integrate_w(std::shared_ptr<const SelfSimilarProfile> S, const Perturbation& z,
                           const EvolutionOptions& opt, const GradedMesh& mesh) {
    const rvec nodes = mesh.nodes();
    EvolutionEngine eng(std::move(S), z, opt, mesh.t_end);
    EvolutionState st;
    st.n = opt.n;
    st.t = 0.0;
    st.grid = eng.grid_for(0.0);
    st.w.assign(st.grid.size(), 0.0);
    st.dw_dt.assign(st.grid.size(), 0.0);
    {
        DecayRecord r0;
        st.history.records.push_back(r0);
    }

    // Start: w(t1) = int_0^{t1} rhs with rhs ~ t^{-p}, p read off rhs(t1) / rhs(t1 / 2).
    const double t1 = nodes[1];
    st.grid = eng.grid_for(t1);
    st.w.assign(st.grid.size(), 0.0);
    cvec r1 = eng.rhs(t1, st.w);
    const FrequencyGrid g_half = eng.grid_for(0.5 * t1);
    const cvec r_half = eng.rhs(0.5 * t1, cvec(g_half.size(), 0.0));
    double p = 0.0;
    if (sup_abs(r1) > 0.0 && sup_abs(r_half) > 0.0) p = std::log2(sup_abs(r_half) / sup_abs(r1));
    p = std::clamp(p, 0.0, 0.95);
    for (std::size_t k = 0; k < st.w.size(); ++k) st.w[k] = t1 * r1[k] / (1.0 - p);
    st.t = t1;
    st.dw_dt = eng.rhs(t1, st.w);

    Stepper stepper{eng, opt};
    double dt = opt.first_step_fraction * (nodes[2] - nodes[1]);
    auto record = [&]() {
        DecayRecord r = eng.measure(st.t, st.w, st.dw_dt);
        r.steps = stepper.steps;
        if (opt.record_energy) {
            const EnergyBreakdown e = eng.energy(st.t, st.w);
            r.energy_transport = e.transport;
            r.energy_source = e.source;
            r.energy_commutator = e.commutator;
            r.source_l2 = e.source_l2;
        }
        r.rhs_evals = eng.rhs_count();
        st.history.records.push_back(r);
        if (opt.delta > 0.0 && r.e_norm > opt.guard_factor * opt.delta) {
            std::ostringstream os;
            os << "bootstrap guard tripped at t=" << st.t << ": |w|_E=" << r.e_norm << " > " << opt.guard_factor
               << " delta";
            fail(ErrorKind::guard, os.str(), r.e_norm);
        }
    };
    record();

    for (std::size_t k = 1; k + 1 < nodes.size(); ++k) {
        const double target = nodes[k + 1];
        while (st.t < target * (1 - 1e-14)) {
            const FrequencyGrid g = eng.grid_for(st.t * (1 + 1e-12));
            // end of this epoch
            double t_stop = target;
            const FrequencyGrid g_target = eng.grid_for(target);
            if (!(g_target == g)) {
                double a = st.t, b = target;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (a + b);
                    (eng.grid_for(mid) == g ? a : b) = mid;
                }
                t_stop = a;
            }
            if (!(st.grid == g)) {
                st.w = eng.regrid(st.t, st.w, st.grid, g);
                st.grid = g;
                st.dw_dt = eng.rhs(st.t * (1 + 1e-12), st.w);
            }
            stepper.advance(st.t, st.w, st.dw_dt, t_stop, dt);
            if (t_stop < target) {
                const FrequencyGrid g2 = eng.grid_for(t_stop * (1 + 1e-10));
                st.w = eng.regrid(st.t, st.w, st.grid, g2);
                st.grid = g2;
                st.t = t_stop * (1 + 1e-10);
                st.dw_dt = eng.rhs(st.t, st.w);
            }
        }
        record();
    }
    st.Iw_hat = eng.iw_hat(st.t, st.w, st.dw_dt);
    st.dw_dxi = eng.dxi(st.t, st.w);
    return st;
}

CauchyResult cauchy_in_n(std::shared_ptr<const SelfSimilarProfile> S, const Perturbation& z, const rvec& n_list,
                         double t_probe, EvolutionOptions opt, GradedMesh mesh) {
    require(n_list.size() >= 2, ErrorKind::invalid_argument, "cauchy: need at least two n");
    require(std::is_sorted(n_list.begin(), n_list.end()), ErrorKind::invalid_argument, "cauchy: n must increase");
    mesh.t_end = t_probe;
    opt.grid_n = n_list.back();
    CauchyResult out;
    out.n_list = n_list;
    for (double n : n_list) {
        opt.n = n;
        out.states.push_back(integrate_w(S, z, opt, mesh));
    }
    for (std::size_t i = 0; i + 1 < out.states.size(); ++i) {
        const auto& a = out.states[i];
        const auto& b = out.states[i + 1];
        require(a.grid == b.grid, ErrorKind::precondition, "cauchy: states are not on a shared grid");
        double sup = 0.0, d2 = 0.0;
        for (std::size_t k = 0; k < a.w.size(); ++k) {
            sup = std::max(sup, std::abs(b.w[k] - a.w[k]));
            d2 += std::norm(b.dw_dxi[k] - a.dw_dxi[k]) * a.grid.spacing();
        }
        out.differences.push_back(sup + std::pow(t_probe, -1.0 / 6.0) * std::sqrt(d2));
    }
    return out;
}

cvec apply_I(const Profile& u, const cvec& du_dt) {
    require(du_dt.size() == u.size(), ErrorKind::invalid_argument, "apply_I: size mismatch");
    const cvec d = half_grid_derivative(u.grid, u.values);
    const double t = u.time;
    cvec out(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double xi = u.grid.node(k);
        out[k] = cd{0.0, -1.0} * std::polar(1.0, -t * cube(xi)) * (d[k] - (3.0 * t / xi) * du_dt[k]);
    }
    return out;
}

BootstrapReport bootstrap_report(const DecaySeries& series, double delta, double t_lo, double t_hi,
                                 std::size_t min_per_decade) {
    BootstrapReport rep;
    struct Spec {
        const char* name;
        double DecayRecord::*field;
        double threshold;
    };
    const Spec specs[] = {
        {"e_norm", &DecayRecord::e_norm, 1.0 / 9 - 0.03},
        {"l2", &DecayRecord::l2, 1.0 / 18 - 0.03},
        {"deriv_weighted", &DecayRecord::deriv_weighted, 5.0 / 18 - 0.05},
        {"dt_sup", &DecayRecord::dt_sup, -8.0 / 9 - 0.05},
    };
    const double decades = std::log10(t_hi / t_lo);
    const auto min_points = std::size_t(std::ceil(double(min_per_decade) * decades));
    rep.pass = true;
    for (const auto& s : specs) {
        RateCheck c;
        c.name = s.name;
        c.threshold = s.threshold;
        auto col = series.column(s.field, t_lo, t_hi);
        const bool zero = std::all_of(col.begin(), col.end(), [](auto& p) { return p.second == 0.0; });
        if (zero && !col.empty()) {
            c.trivial = true;
            c.pass = true;
        } else {
            c.fit = fit_decay_exponent(col, min_points, 0.9 * decades);
            c.pass = c.fit.exponent >= c.threshold;
        }
        rep.pass = rep.pass && c.pass;
        rep.rates.push_back(c);
    }
    const double d3 = delta * delta * delta;
    for (const auto& r : series.records) {
        if (!(r.t > 0.0) || !(d3 > 0.0)) continue;
        rep.fn_plateau = std::max(rep.fn_plateau, r.fn() / d3);
        rep.iw_constant = std::max(rep.iw_constant, r.iw_weighted / (d3 * std::pow(t_lo > 0 ? r.t : r.t, 5.0 / 18) *
                                                                     (std::pow(r.t, 1.0 / 18) + 1.0)));
    }
    return rep;
}

}  // namespace mkdv
