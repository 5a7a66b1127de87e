#include "mkdv/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

namespace mkdv {

namespace {
// FFTW's planner is not thread-safe; execution with new-array is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct SpectralTransform::Impl {
    fftw_plan fwd = nullptr;  // e^{-2 pi i jk/m}
    fftw_plan bwd = nullptr;  // e^{+2 pi i jk/m}
    cvec pre_space;           // applied to u_j before the freq transform
    cvec post_freq;           // applied after it
    cvec pre_freq;            // applied to F_k before the space transform
    cvec post_space;
    std::size_t m;

    explicit Impl(std::size_t m_) : m(m_) {
        std::lock_guard lk(planner_mutex());
        auto* buf = fftw_alloc_complex(m);
        fwd = fftw_plan_dft_1d(int(m), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(int(m), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        fftw_free(buf);
    }
    ~Impl() {
        std::lock_guard lk(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
};

SpectralTransform::SpectralTransform(std::size_t m, double h, bool half_offset)
    : m_(m), h_(h), dx_(2.0 * std::numbers::pi / (double(m) * h)) {
    require(m >= 4 && m % 2 == 0, ErrorKind::invalid_argument, "transform size must be even");
    impl_ = std::make_unique<Impl>(m);
    const double s = half_offset ? 0.5 : 0.0;
    const double sign_half = (m / 2) % 2 == 0 ? 1.0 : -1.0;
    impl_->pre_space.resize(m);
    impl_->post_freq.resize(m);
    impl_->pre_freq.resize(m);
    impl_->post_space.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double alt = (j % 2 == 0) ? 1.0 : -1.0;
        const double ph = 2.0 * std::numbers::pi * (double(j) - 0.5 * double(m)) * s / double(m);
        impl_->pre_space[j] = alt * std::polar(1.0, ph);
        impl_->post_freq[j] = dx_ * alt * sign_half;
        impl_->pre_freq[j] = alt;
        impl_->post_space[j] = (h_ / (2.0 * std::numbers::pi)) * alt * sign_half * std::polar(1.0, -ph);
    }
}

SpectralTransform::~SpectralTransform() = default;

void SpectralTransform::to_freq(const cd* space, cd* freq) const {
    cvec buf(m_);
    for (std::size_t j = 0; j < m_; ++j) buf[j] = space[j] * impl_->pre_space[j];
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(impl_->bwd, p, p);
    for (std::size_t k = 0; k < m_; ++k) freq[k] = buf[k] * impl_->post_freq[k];
}

void SpectralTransform::to_space(const cd* freq, cd* space) const {
    cvec buf(m_);
    for (std::size_t k = 0; k < m_; ++k) buf[k] = freq[k] * impl_->pre_freq[k];
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(impl_->fwd, p, p);
    for (std::size_t j = 0; j < m_; ++j) space[j] = buf[j] * impl_->post_space[j];
}

std::size_t good_fft_size(std::size_t n) {
    n = std::max<std::size_t>(n, 4);
    for (std::size_t c = (n + 3) / 4 * 4;; c += 4) {
        std::size_t r = c;
        for (std::size_t p : {2u, 3u, 5u})
            while (r % p == 0) r /= p;
        if (r == 1) return c;
    }
}

namespace {

// Fraction of the sup found in the outer 5% of the band on either side.
double outer_band_ratio(const cvec& v) {
    const std::size_t m = v.size();
    const std::size_t band = std::max<std::size_t>(2, m / 20);
    double sup = 0.0, edge = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double a = std::abs(v[k]);
        sup = std::max(sup, a);
        if (k < band || k >= m - band) edge = std::max(edge, a);
    }
    return sup > 0.0 ? edge / sup : 0.0;
}

}  // namespace

Profile forward_transform(const SpaceField& f, double alias_tol) {
    const std::size_t m = f.grid.size();
    const FrequencyGrid g = f.grid.dual();
    SpectralTransform T(m, g.spacing(), true);
    cvec out(m);
    T.to_freq(f.values.data(), out.data());
    const double r = outer_band_ratio(out);
    if (r > alias_tol)
        fail(ErrorKind::aliasing,
             "forward_transform: spectrum not resolved (outer-band ratio " + std::to_string(r) + ")", r);
    if (f.real) assert_hermitian(out, 1e-9, "forward_transform");
    return Profile(g, std::move(out), std::max(f.time, 0.0));
}

Profile forward_transform(const SpaceField& f, double requested_max_frequency, double alias_tol) {
    const FrequencyGrid g = f.grid.dual();
    if (requested_max_frequency > g.max_frequency())
        fail(ErrorKind::aliasing, "forward_transform: grid too coarse for requested max frequency " +
                                      std::to_string(requested_max_frequency) + " (representable " +
                                      std::to_string(g.max_frequency()) + ")");
    return forward_transform(f, alias_tol);
}

SpaceField inverse_transform(const Profile& uhat, bool real) {
    const std::size_t m = uhat.grid.size();
    SpectralTransform T(m, uhat.grid.spacing(), true);
    cvec out(m);
    T.to_space(uhat.values.data(), out.data());
    if (real)
        for (auto& v : out) v = cd{v.real(), 0.0};
    return SpaceField(SpaceGrid(uhat.grid), std::move(out), uhat.time, real);
}

cvec hat_from_profile(const Profile& p) {
    cvec out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double xi = p.grid.node(k);
        out[k] = std::polar(1.0, -p.time * xi * xi * xi) * p.values[k];
    }
    return out;
}

Profile profile_from_hat(const FrequencyGrid& g, const cvec& uhat, double t) {
    require(uhat.size() == g.size(), ErrorKind::invalid_argument, "profile_from_hat: size mismatch");
    cvec out(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double xi = g.node(k);
        out[k] = std::polar(1.0, t * xi * xi * xi) * uhat[k];
    }
    return Profile(g, std::move(out), t);
}

SpaceField airy_propagate(const Perturbation& z, double t) {
    require(t >= 0.0, ErrorKind::invalid_argument, "airy_propagate: t must be >= 0");
    const FrequencyGrid& g = z.freq.grid;
    const cvec zh = z.hat_on(g);
    Profile p(g, zh, t);  // profile is constant: z~ = z^
    Profile hat(g, hat_from_profile(p), t);
    SpaceField out = inverse_transform(hat, z.space.real);
    out.time = t;
    return out;
}

double l2_space(const SpaceField& f) {
    double s = 0.0;
    for (const auto& v : f.values) s += std::norm(v);
    return std::sqrt(s * f.grid.dx());
}

double l2_freq(const Profile& p) {
    double s = 0.0;
    for (const auto& v : p.values) s += std::norm(v);
    return std::sqrt(s * p.grid.spacing());
}

double hermitian_defect(const cvec& uhat) {
    const std::size_t m = uhat.size();
    double d = 0.0;
    for (std::size_t k = 0; k < m / 2; ++k) d = std::max(d, std::abs(uhat[m - 1 - k] - std::conj(uhat[k])));
    return d;
}

void assert_hermitian(const cvec& uhat, double tol, const char* what) {
    double sup = 0.0;
    for (const auto& v : uhat) sup = std::max(sup, std::abs(v));
    const double d = hermitian_defect(uhat);
    if (d > tol * std::max(sup, 1e-300))
        fail(ErrorKind::precondition,
             std::string(what) + ": real field lost Hermitian symmetry (defect " + std::to_string(d) + ")", d);
}

}  // namespace mkdv
