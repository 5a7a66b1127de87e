#include "mkdv/cutoff.hpp"

#include <cmath>

namespace mkdv {

double CutoffFamily::psi(double s) noexcept { return s > 0.0 ? s * s * std::exp(-1.0 / s) : 0.0; }

double CutoffFamily::dpsi(double s) noexcept { return s > 0.0 ? (2.0 * s + 1.0) * std::exp(-1.0 / s) : 0.0; }

double CutoffFamily::chi(double xi) noexcept { return std::exp(-psi(std::abs(xi) - 1.0)); }

double CutoffFamily::log_chi_n(double xi, double n) const noexcept { return -2.0 * psi(std::abs(xi) / n - 1.0); }

double CutoffFamily::chi_n(double xi, double n) const noexcept { return std::exp(log_chi_n(xi, n)); }

double CutoffFamily::dchi_n(double xi, double n) const noexcept {
    const double sg = xi > 0.0 ? 1.0 : (xi < 0.0 ? -1.0 : 0.0);
    return -2.0 * dpsi(std::abs(xi) / n - 1.0) * sg / n * chi_n(xi, n);
}

double CutoffFamily::xi_dlog_chi_n(double xi, double n) const noexcept {
    return -2.0 * dpsi(std::abs(xi) / n - 1.0) * std::abs(xi) / n;
}

double CutoffFamily::support_radius(double n, double level) const {
    require(level > 0.0 && level < 1.0 && n > 0.0, ErrorKind::invalid_argument, "support_radius: bad level");
    const double target = -std::log(level) / 2.0;
    double lo = 0.0, hi = 1.0;
    while (psi(hi) < target) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (psi(mid) < target ? lo : hi) = mid;
    }
    return n * (1.0 + hi);
}

rvec CutoffFamily::sample(const FrequencyGrid& g, double n) const {
    rvec out(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) out[k] = chi_n(g.node(k), n);
    return out;
}

}  // namespace mkdv
