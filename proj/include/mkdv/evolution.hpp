#pragma once

#include <memory>
#include <vector>

#include "mkdv/cutoff.hpp"
#include "mkdv/fit.hpp"
#include "mkdv/selfsimilar.hpp"

namespace mkdv {

/// t_k = t_end (k/K)^gamma, k = 0..K.
struct GradedMesh {
    double t_end = 1.0;
    std::size_t K = 96;
    double gamma = 3.0;
    rvec nodes() const;
};

struct EvolutionOptions {
    double n = 8.0;
    double sign = 1.0;             // +1 focusing
    double band_level = 1e-4;      // w and S~_n are kept where chi_n >= band_level
    double rtol = 1e-6;            // step error relative to sup |w~|
    double atol = 1e-16;
    double box_safety = 1.25;
    double box_margin = 30.0;
    double delta = 0.05;
    double guard_factor = 10.0;    // E-norm above guard_factor * delta trips the guard
    bool expanded = true;          // u^3 - S^3 = 3 S^2 v + 3 S v^2 + v^3 (false: direct difference)
    std::size_t max_steps = 200000;
    /// Shared geometry: if > 0, box sized for this n instead of `n` (Cauchy studies).
    double grid_n = 0.0;
    double first_step_fraction = 0.02;
    bool record_energy = true;     // energy terms at every node (two extra transforms)
};

/// Per-node diagnostics.
struct DecayRecord {
    double t = 0.0;
    double e_norm = 0.0;          // |w~|_inf + t^{-1/6} |d_xi w~|_{L^2}
    double sup = 0.0;             // |w~|_inf
    double deriv_l2 = 0.0;        // |d_xi w~|_{L^2}
    double l2 = 0.0;              // |w|_{L^2(dx)}
    double deriv_weighted = 0.0;  // |d_xi w~ chi_n^{-1/2}|_{L^2}
    double sup_weighted = 0.0;    // |w~ chi_n^{-1}|_inf
    double dt_sup = 0.0;          // |d_t w~|_inf
    double iw_weighted = 0.0;     // |I^w chi_n^{-1/2}|_{L^2}
    double f_sup = 0.0;           // t^{-1/9} |w~ chi_n^{-1}|_inf
    double f_deriv = 0.0;         // t^{-1/9} t^{-1/6} |d_xi w~ chi_n^{-1/2}|
    double zero_freq = 0.0;       // max |w~| at the two nodes next to 0
    double hermitian = 0.0;       // Hermitian defect of e^{-it xi^3} w~
    double energy_transport = 0.0;
    double energy_source = 0.0;
    double energy_commutator = 0.0;
    double source_l2 = 0.0;       // |F(u^2 (Iz)_x)|_{L^2} on the active band
    std::size_t steps = 0;        // accepted steps so far
    std::size_t rhs_evals = 0;
    double fn() const noexcept { return f_sup + f_deriv; }
};

struct DecaySeries {
    std::vector<DecayRecord> records;
    std::vector<std::pair<double, double>> column(double DecayRecord::*field, double t_lo = 0.0,
                                                  double t_hi = INFINITY) const;
};

struct EnergyBreakdown {
    double transport = 0.0;   // 6 Re int F(u^2 (Iw)_x) conj(J)
    double source = 0.0;      // 6 Re int F(u^2 (Iz)_x) conj(J)
    double commutator = 0.0;  // -2 Re int xi chi_n'/chi_n D^ conj(J)
    double total() const noexcept { return transport + source + commutator; }
    double energy = 0.0;      // int |J|^2 chi_n^{-1}
    double source_l2 = 0.0;   // |F(u^2 (Iz)_x)|_{L^2(dxi)}
};

class EvolutionEngine;

/// w~ at the current node plus cached derivatives.
struct EvolutionState {
    FrequencyGrid grid;   // storage grid of the current epoch
    double t = 0.0;
    double n = 0.0;
    cvec w;               // w~
    cvec dw_dt;           // RHS at t
    cvec Iw_hat;          // J = F(I w)
    cvec dw_dxi;          // d_xi w~ (spectral)
    DecaySeries history;
    Profile profile() const { return Profile(grid, w, t); }
};

/// Pseudo-spectral evaluation of the truncated remainder equation
///   d_t w~ = -sign chi_n(xi) i xi e^{i t xi^3} F(u^3 - S_n^3),  u = S_n + e^{-t d^3} z + w,
/// on boxes sized per time epoch so the dispersed fields fit.
class EvolutionEngine {
public:
    EvolutionEngine(std::shared_ptr<const SelfSimilarProfile> S, Perturbation z, EvolutionOptions opt,
                    double t_end);
    ~EvolutionEngine();
    EvolutionEngine(EvolutionEngine&&) noexcept;

    /// Storage grid for time t (epoch-dependent).
    FrequencyGrid grid_for(double t) const;
    /// RHS on the storage grid of t. w is given on that grid.
    cvec rhs(double t, const cvec& w) const;
    /// J = F(Iw) on the storage grid.
    cvec iw_hat(double t, const cvec& w, const cvec& dw_dt) const;
    /// d/dt int |J|^2 chi_n^{-1} split into its three terms.
    EnergyBreakdown energy(double t, const cvec& w) const;
    /// d_xi w~ (spectral).
    cvec dxi(double t, const cvec& w) const;
    /// Moves w from the grid of t_from to the grid of t_to (exact, via physical space).
    cvec regrid(double t, const cvec& w, const FrequencyGrid& from, const FrequencyGrid& to) const;

    DecayRecord measure(double t, const cvec& w, const cvec& dw_dt) const;

    const EvolutionOptions& options() const noexcept { return opt_; }
    const CutoffFamily& cutoff() const noexcept { return cutoff_; }
    double band() const noexcept { return band_; }
    std::size_t rhs_count() const noexcept;
    /// Largest compute-grid size used so far.
    std::size_t max_compute_nodes() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    EvolutionOptions opt_;
    CutoffFamily cutoff_;
    double band_ = 0.0;
};

/// Integrate from w(0) = 0 to mesh.t_end. Throws ErrorKind::guard if the E-norm
/// exceeds guard_factor * delta (an experimental outcome, not a crash).
EvolutionState integrate_w(std::shared_ptr<const SelfSimilarProfile> S, const Perturbation& z,
                           const EvolutionOptions& opt, const GradedMesh& mesh);

/// w~(t_probe) differences |w_{n_{k+1}} - w_{n_k}|_E on a shared grid.
struct CauchyResult {
    rvec n_list;
    rvec differences;
    std::vector<EvolutionState> states;
};
CauchyResult cauchy_in_n(std::shared_ptr<const SelfSimilarProfile> S, const Perturbation& z, const rvec& n_list,
                         double t_probe, EvolutionOptions opt, GradedMesh mesh);

/// Generic I on a sampled profile: I^u = -i e^{-it xi^3} (d_xi u~ - (3t/xi) d_t u~),
/// d_xi by one-sided differences at 0.
cvec apply_I(const Profile& u, const cvec& du_dt);

struct RateCheck {
    std::string name;
    PowerLawFit fit;
    double threshold = 0.0;
    bool pass = false;
    bool trivial = false;  // identically zero series
};
struct BootstrapReport {
    std::vector<RateCheck> rates;
    double fn_plateau = 0.0;         // max_t f_n(t) / delta^3
    double iw_constant = 0.0;        // max_t |I^w chi^{-1/2}| / (delta^3 t^{5/18} (t^{1/18} + 1))
    bool pass = false;
};
BootstrapReport bootstrap_report(const DecaySeries& series, double delta, double t_lo = 1e-3, double t_hi = 1e-1,
                                 std::size_t min_per_decade = 8);

}  // namespace mkdv
