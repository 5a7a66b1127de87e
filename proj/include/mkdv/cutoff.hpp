#pragma once

#include "mkdv/grid.hpp"

namespace mkdv {

/// chi(xi) = exp(-psi(|xi| - 1)), psi(s) = s^2 exp(-1/s) for s > 0, else 0.
/// Smooth, 0 < chi <= 1, chi = 1 on [-1, 1], Gaussian-like decay.
/// chi_n(xi) = chi(xi / n)^2.
class CutoffFamily {
public:
    static double psi(double s) noexcept;
    static double dpsi(double s) noexcept;

    static double chi(double xi) noexcept;
    double chi_n(double xi, double n) const noexcept;
    /// log chi_n, finite far past the underflow of chi_n itself.
    double log_chi_n(double xi, double n) const noexcept;
    double dchi_n(double xi, double n) const noexcept;
    /// xi chi_n'(xi) / chi_n(xi), finite everywhere.
    double xi_dlog_chi_n(double xi, double n) const noexcept;

    /// Frequency where chi_n drops to `level` (>0, <1).
    double support_radius(double n, double level) const;

    rvec sample(const FrequencyGrid& g, double n) const;
};

}  // namespace mkdv
