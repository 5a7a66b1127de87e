#pragma once

#include <memory>

#include "mkdv/profile.hpp"

namespace mkdv {

// Convention (fixed once, everything else follows):
//   u^(xi) = int e^{+i x xi} u(x) dx,   u(x) = (1/2pi) int e^{-i x xi} u^(xi) dxi.
// Then d_x <-> -i xi, d_x^3 <-> i xi^3, the Airy flow multiplies u^ by
// e^{-i t xi^3}, and the profile e^{i t xi^3} u^ is constant under it.
// F(fgh) = (1/4pi^2) f^ * g^ * h^, which is where the 1/4pi^2 in N comes from.

/// DFT pair on m nodes between x_j = (j - m/2) dx and xi_k = (k - m/2 + s) h with
/// dx h = 2pi/m and s in {0, 1/2}. s = 1/2 pairs with anti-periodic fields.
class SpectralTransform {
public:
    SpectralTransform(std::size_t m, double h, bool half_offset = true);
    ~SpectralTransform();
    SpectralTransform(const SpectralTransform&) = delete;
    SpectralTransform& operator=(const SpectralTransform&) = delete;

    std::size_t size() const noexcept { return m_; }
    double h() const noexcept { return h_; }
    double dx() const noexcept { return dx_; }

    /// In-place safe: out may alias in.
    void to_space(const cd* freq, cd* space) const;
    void to_freq(const cd* space, cd* freq) const;

private:
    struct Impl;
    std::size_t m_;
    double h_, dx_;
    std::unique_ptr<Impl> impl_;
};

/// Smallest FFT-friendly size (2^a 3^b 5^c) >= n, rounded to a multiple of 4.
std::size_t good_fft_size(std::size_t n);

/// u^ on the dual frequency grid of f.grid. Throws ErrorKind::aliasing when the
/// spectrum is not resolved (energy in the outer band above tol).
Profile forward_transform(const SpaceField& f, double alias_tol = 1e-9);
/// Same, but first checks that the requested max frequency is representable.
Profile forward_transform(const SpaceField& f, double requested_max_frequency, double alias_tol);
SpaceField inverse_transform(const Profile& uhat, bool real = true);

/// Profile <-> hat conversions: u~ = e^{i t xi^3} u^.
cvec hat_from_profile(const Profile& p);
Profile profile_from_hat(const FrequencyGrid& g, const cvec& uhat, double t);

/// e^{-t d_x^3} z on z's space grid.
SpaceField airy_propagate(const Perturbation& z, double t);

/// Plancherel: ||f||_{L^2}^2 = (1/2pi) ||f^||_{L^2}^2.
double l2_space(const SpaceField& f);
double l2_freq(const Profile& p);  // ||.||_{L^2(dxi)}

/// Max deviation from u^(-xi) = conj(u^(xi)).
double hermitian_defect(const cvec& uhat);
/// Throws if the hermitian defect exceeds tol * sup.
void assert_hermitian(const cvec& uhat, double tol, const char* what);

}  // namespace mkdv
