#pragma once

#include <functional>
#include <vector>

#include "mkdv/profile.hpp"

namespace mkdv {

/// Phi = xi^3 - xi1^3 - xi2^3 - xi3^3 with xi3 = xi - xi1 - xi2.
struct CubicPhase {
    static double expanded(double xi, double xi1, double xi2) noexcept;
    /// 3 (xi - xi1)(xi - xi2)(xi - xi3)
    static double factored(double xi, double xi1, double xi2) noexcept;
};

/// A profile seen as a function: values, support, and jump points.
struct ProfileFn {
    std::function<cd(double)> eval;
    double lo = 0.0, hi = 0.0;          // support
    double dom_lo = 0.0, dom_hi = 0.0;  // where the function is known
    rvec breaks;  // points where the function may jump (0 for sampled profiles)
    double sup = 0.0;

    /// Cubic half-grid interpolation; support where |u| > support_tol * sup.
    static ProfileFn from_profile(const Profile& p, double support_tol = 1e-12);
    static ProfileFn from_function(std::function<cd(double)> f, double lo, double hi, rvec breaks = {0.0},
                                   double sup = 0.0);
    bool zero() const noexcept { return !(sup > 0.0) || !(hi > lo); }
};

enum class NMethod { direct, leading, hybrid, spectral };
const char* to_string(NMethod m) noexcept;

struct NEvaluation {
    cd value{};
    NMethod method = NMethod::direct;
    double estimated_error = 0.0;
};

struct QuadratureOptions {
    double rel_tol = 1e-8;          // error estimate allowed, relative to the integrand scale
    double abs_tol = 1e-14;
    double panel_fraction = 0.25;   // panels at most this fraction of the local wavelength
    std::size_t max_evaluations = 400'000'000;
};

/// (i xi / 4 pi^2) iint e^{i t Phi} f(xi1) g(xi2) h(xi - xi1 - xi2) dxi1 dxi2 by
/// nested Gauss-Legendre panels sized to the local wavelength 2pi/(t|grad Phi|+1).
/// Throws ErrorKind::quadrature (with the estimate) when the estimate exceeds tolerance.
NEvaluation trilinear_N_direct(const ProfileFn& f, const ProfileFn& g, const ProfileFn& h, double t, double xi,
                               const QuadratureOptions& opt = {});
NEvaluation trilinear_N_direct(const Profile& f, const Profile& g, const Profile& h, double t, double xi,
                               const QuadratureOptions& opt = {});

/// Same trilinear form through physical space: N = i xi e^{i t xi^3} F(f g h),
/// each factor being e^{-t d^3} applied to the profile. Grid chosen so the
/// dispersed fields fit in the box and the product is alias-free at xi.
struct SpectralNOptions {
    double box_margin = 40.0;       // extra half-width beyond 3 t xi_max^2
    double oversample = 1.0;        // multiplies the node count
    std::size_t max_nodes = 1u << 24;
};
cvec N_spectral(const ProfileFn& f, const ProfileFn& g, const ProfileFn& h, double t, const rvec& xis,
                const SpectralNOptions& opt = {});
cvec N_spectral(const Profile& f, const Profile& g, const Profile& h, double t, const rvec& xis,
                const SpectralNOptions& opt = {});

/// (xi^3 / (4 pi <xi^3 t>)) ( i |u(xi)|^2 u(xi) + 3^{-1/2} e^{8 i t xi^3 / 9} u(xi/3)^3 ),
/// the stationary-phase leading part of N[u] in this code's convention.
/// xi > 0, or any xi with real_field (Hermitian extension).
cd leading_term_N(const ProfileFn& u, double t, double xi, bool real_field = true);
cd leading_term_N(const Profile& u, double t, double xi, bool real_field = true);

/// Hybrid: leading term + frozen remainder bound when xi^3 t > threshold, direct otherwise.
struct HybridPolicy {
    double threshold = 100.0;
    double remainder_bound = 0.0;   // frozen C in |R| <= C xi^3 |u|_E^3 / ((xi^3 t)^{5/6} <xi^3 t>^{1/4})
    double e_norm = 0.0;
};
NEvaluation N_hybrid(const ProfileFn& u, double t, double xi, const HybridPolicy& pol, const QuadratureOptions& opt = {});

/// |N - N_leading| (xi^3 t)^{5/6} <xi^3 t>^{1/4} / (xi^3 |u|_E^3) for one point.
double remainder_gauge_value(cd n_exact, cd n_lead, double t, double xi, double e_norm);

enum class NSource { direct, spectral };
/// Max of the gauge over xi_set (u given as a fixed profile at time t).
double remainder_gauge(const Profile& u, double t, const rvec& xi_set, NSource src = NSource::spectral,
                       const QuadratureOptions& opt = {});

/// K(sigma) = int e^{3 i sigma mu^2 / 4} S((sigma + mu)/2) S((sigma - mu)/2) dmu.
NEvaluation kernel_K(const ProfileFn& S, double sigma, const QuadratureOptions& opt = {});
NEvaluation kernel_K(const Profile& S, double sigma, const QuadratureOptions& opt = {});

enum class ZPattern { zvv, zzv, zzz };
/// sup_xi |N[pattern]| * (t^{8/9} | t^{2/3} | 1) / (|||z|||^a |v|_E^b), sup over xi on xis.
double z_interaction_gauge(const Perturbation& z, const Profile& v, double t, ZPattern pattern, const rvec& xis);

}  // namespace mkdv
