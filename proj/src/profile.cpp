#include "mkdv/profile.hpp"

#include <cmath>
#include <numbers>

#include "mkdv/fourier.hpp"
#include "mkdv/interp.hpp"
#include "mkdv/norms.hpp"

namespace mkdv {

Profile::Profile(FrequencyGrid g, cvec v, double t) : grid(std::move(g)), values(std::move(v)), time(t) {
    validate();
}

Profile Profile::zeros(const FrequencyGrid& g, double t) { return Profile(g, cvec(g.size()), t); }

Profile Profile::sample(const FrequencyGrid& g, double t, const std::function<cd(double)>& f) {
    cvec v(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) v[k] = f(g.node(k));
    return Profile(g, std::move(v), t);
}

void Profile::validate() const {
    require(values.size() == grid.size(), ErrorKind::invalid_argument, "profile: one value per node required");
    require(time >= 0.0 && std::isfinite(time), ErrorKind::invalid_argument, "profile: time must be finite and >= 0");
    for (const auto& v : values)
        require(std::isfinite(v.real()) && std::isfinite(v.imag()), ErrorKind::invalid_argument,
                "profile: non-finite value");
}

double Profile::sup() const {
    double s = 0.0;
    for (const auto& v : values) s = std::max(s, std::abs(v));
    return s;
}

SpaceField::SpaceField(SpaceGrid g, cvec v, double t, bool is_real)
    : grid(std::move(g)), values(std::move(v)), time(t), real(is_real) {
    require(values.size() == grid.size(), ErrorKind::invalid_argument, "space field: one value per node required");
}

void SpaceField::validate(double tol) const {
    const double s = sup();
    for (const auto& v : values) {
        require(std::isfinite(v.real()) && std::isfinite(v.imag()), ErrorKind::invalid_argument,
                "space field: non-finite value");
        if (real && std::abs(v.imag()) > tol * std::max(s, 1e-300))
            fail(ErrorKind::invalid_argument, "space field declared real has an imaginary part");
    }
}

double SpaceField::sup() const {
    double s = 0.0;
    for (const auto& v : values) s = std::max(s, std::abs(v));
    return s;
}

cvec Perturbation::hat_on(const FrequencyGrid& g) const {
    cvec out(g.size());
    if (hat_fn) {
        for (std::size_t k = 0; k < g.size(); ++k) out[k] = hat_fn(g.node(k));
        return out;
    }
    if (g == freq.grid) return freq.values;
    HalfGridInterpolator ip(freq);
    for (std::size_t k = 0; k < g.size(); ++k) out[k] = ip(g.node(k));
    return out;
}

cvec Perturbation::dhat_on(const FrequencyGrid& g) const {
    cvec out(g.size());
    if (dhat_fn) {
        for (std::size_t k = 0; k < g.size(); ++k) out[k] = dhat_fn(g.node(k));
        return out;
    }
    cvec d = half_grid_derivative(freq.grid, freq.values);
    if (g == freq.grid) return d;
    HalfGridInterpolator ip(freq.grid, d);
    for (std::size_t k = 0; k < g.size(); ++k) out[k] = ip(g.node(k));
    return out;
}

Perturbation gaussian_perturbation(double a, double w, const FrequencyGrid& g) {
    require(w > 0.0, ErrorKind::invalid_argument, "gaussian width must be positive");
    Perturbation z;
    z.hat_fn = [a, w](double xi) { return cd{a * std::exp(-xi * xi / (w * w)), 0.0}; };
    z.dhat_fn = [a, w](double xi) { return cd{-2.0 * xi / (w * w) * a * std::exp(-xi * xi / (w * w)), 0.0}; };
    z.freq = Profile::sample(g, 0.0, z.hat_fn);
    SpaceGrid sg(g);
    cvec zx(sg.size());
    const double pref = a * w / (2.0 * std::sqrt(std::numbers::pi));
    for (std::size_t j = 0; j < sg.size(); ++j) {
        const double x = sg.node(j);
        zx[j] = pref * std::exp(-x * x * w * w / 4.0);
    }
    z.space = SpaceField(sg, std::move(zx), 0.0, true);
    z.z_norm_components = z_norm_components(z.space, z.freq);
    return z;
}

Perturbation zero_perturbation(const FrequencyGrid& g) {
    Perturbation z;
    z.hat_fn = [](double) { return cd{}; };
    z.dhat_fn = [](double) { return cd{}; };
    z.freq = Profile::zeros(g, 0.0);
    SpaceGrid sg(g);
    z.space = SpaceField(sg, cvec(sg.size()), 0.0, true);
    return z;
}

}  // namespace mkdv
