#pragma once

#include "mkdv/cutoff.hpp"
#include "mkdv/profile.hpp"

namespace mkdv {

/// ||u||_{E(t)} = ||u~||_inf + t^{-1/6} ||d_xi u~||_{L^2(R \ 0)}.
double e_norm(const Profile& p);

struct ENormParts {
    double sup = 0.0;
    double deriv_l2 = 0.0;  // unweighted ||d_xi u~||_{L^2}
    double weight = 0.0;    // t^{-1/6}
    double total() const noexcept { return sup + weight * deriv_l2; }
};
ENormParts e_norm_parts(const Profile& p);

/// |||z||| = ||z||_{L^1} + ||<xi>^2 z^||_{L^1} + ||<xi> d_xi z^||_{L^1}.
ZNormComponents z_norm_components(const SpaceField& z, const Profile& zhat, double tail_tol = 1e-8);
double z_norm(const Perturbation& z);

/// ||u~ chi_n^{-1}||_inf + ||d_xi u~ chi_n^{-1/2}||_{L^2}.
double xn_norm(const Profile& p, const CutoffFamily& cutoff, double n);

struct XnParts {
    double sup_weighted = 0.0;
    double deriv_weighted = 0.0;
    double total() const noexcept { return sup_weighted + deriv_weighted; }
};
XnParts xn_norm_parts(const Profile& p, const CutoffFamily& cutoff, double n);

enum class DecayGauge { e_type, z_type };

/// sup_x |f(t,x)| w(t,x) / ref with w = t^{1/3} <x/t^{1/3}>^{1/4} (E-type) or
/// max(1, t^{1/3} <x/t^{1/3}>^{1/4}) (Z-type, i.e. divided by the min(1, .) bound).
double pointwise_decay_ratio(const SpaceField& f, DecayGauge gauge, double reference_norm);

/// h * sum |v|^2 over nodes, square-rooted (midpoint rule on the offset grid).
double l2_nodes(const FrequencyGrid& g, const cvec& v);

}  // namespace mkdv
