#pragma once

#include <optional>

#include "mkdv/cutoff.hpp"
#include "mkdv/profile.hpp"

namespace mkdv {

/// Shooting for V'' - (y/3) V = V^3 + alpha from the right, where
/// V ~ k Ai(3^{-1/3} y) - 3 alpha / y + c4 / y^4.
struct ShootingOptions {
    double y_right = 14.0;      // Airy matching point
    double dy = 0.025;
    double y_left = 3500.0;     // integrate down to -y_left
    double taper = 0.3;         // cosine taper on the last `taper` fraction of the left range
    double guard = 10.0;        // |V| above this is a divergence
    double rtol = 1e-12;
    double atol = 1e-15;
    double secant_y_left = 600.0;  // short range used while matching c
    int max_secant = 40;
    double c_tol = 1e-8;
    double small_bound = 0.1;   // |c| + |alpha| limit
};

struct AsymptoticFit {
    cd A{};
    cd B{};
    double a = 0.0;
    double c_fit = 0.0;
    double alpha_fit = 0.0;
    double jump_im = 0.0;           // Im(S(0+) - S(0-))
    double re_jump = 0.0;           // Re(S(0+) - S(0-)), should vanish
    double A_stderr = 0.0;
    double B_stderr = 0.0;
    double a_stderr = 0.0;
    double phase_r2 = 0.0;          // linearity of the phase against ln|eta|
    double residual_large = 0.0;    // rms misfit in the |eta^3| >> 1 window, relative to |A|
    double residual_small = 0.0;    // rms misfit of the plateau fit
    bool large_resolved = false;    // false: nothing beyond the plateau to fit
    bool B_resolved = false;        // B above its own standard error
    double eta_lo = 0.0, eta_hi = 0.0;
};

struct FitOptions {
    double eta_lo = 2.5;          // start of the |eta^3| >> 1 window
    double eta_hi = 0.0;          // 0: up to the end of the grid
    double plateau = 0.2;         // |eta| <= plateau for the |eta^3| << 1 fit
};

/// V real-valued on a symmetric space grid; S~(eta) = e^{i eta^3} V^(eta).
struct SelfSimilarProfile {
    double c = 0.0;
    double alpha = 0.0;
    double k = 0.0;               // shooting amplitude
    ShootingOptions options;
    SpaceField V;                 // untapered, zero beyond the integration range
    Profile S_freq;               // S~(eta) on the reliable band
    Profile N1;                   // N[S](1, eta) = i eta e^{i eta^3} F(V^3)(eta)
    Profile dS;                   // dS~/deta, spectrally
    double band = 0.0;            // reliable |eta|
    AsymptoticFit fitted;

    /// S~(eta); beyond the band, the fitted large-eta asymptotics.
    cd eval(double eta) const;
    cd eval_N1(double eta) const;
    /// S~(t, xi) = S~(t^{1/3} xi) sampled on g.
    Profile profile_at(double t, const FrequencyGrid& g) const;
    bool trivial() const noexcept { return c == 0.0 && alpha == 0.0; }
};

/// V on a grid with spacing dy covering [-y_left, y_right]; secant on k until
/// Re S~(0) = c. Throws divergence / convergence errors.
SpaceField solve_profile_V(double c, double alpha, const ShootingOptions& opt = {}, double* k_out = nullptr);

/// Raw shooting for a given amplitude (no matching).
SpaceField shoot_V(double k, double alpha, double y_left, const ShootingOptions& opt);

/// Frequency side of V, band-limited to where the left tail was resolved.
Profile profile_to_frequency(const SpaceField& V, double alpha, const ShootingOptions& opt = {},
                             double eta_max = 0.0);

AsymptoticFit fit_asymptotics(const Profile& S, const FitOptions& opt = {});

/// Full pipeline: shoot, transform, fit.
SelfSimilarProfile build_selfsimilar(double c, double alpha, const ShootingOptions& opt = {});
/// Frequency side and fit from an already shot V (used when loading from cache).
SelfSimilarProfile assemble_selfsimilar(double c, double alpha, double k, SpaceField V, const ShootingOptions& opt);

/// S~_n(t, xi) = chi_n(t^{1/3} xi) S~(t^{1/3} xi) on the grid of S (S given at t = 1 in eta).
Profile truncate_Sn(const Profile& S, const CutoffFamily& cutoff, double n, double t);
Profile truncate_Sn(const SelfSimilarProfile& S, const FrequencyGrid& g, const CutoffFamily& cutoff, double n,
                    double t);

/// sup over xi_set of |(S~(t2) - S~(t1))/(t2 - t1) - d_t S~(t_mid)| where the
/// right side comes from the profile equation with N evaluated at the midpoint.
double selfsim_residual(const SelfSimilarProfile& S, double t1, double t2, const rvec& xi_set, double sign = 1.0);

/// V'' - (y/3) V - V^3 - alpha by 8th-order differences; max over [y_lo, y_hi].
double ode_residual(const SpaceField& V, double alpha, double y_lo, double y_hi);

/// Linear decaying solution used for matching: Ai(3^{-1/3} y).
double airy_profile(double y);

}  // namespace mkdv
