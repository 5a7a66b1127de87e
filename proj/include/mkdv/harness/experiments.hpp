#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mkdv/evolution.hpp"
#include "mkdv/harness/config.hpp"
#include "mkdv/harness/report.hpp"
#include "mkdv/profile.hpp"

namespace mkdv::harness {

/// Check names each experiment kind must report, in order.
std::vector<std::string> suite_manifest(ExperimentKind kind);

/// Gaussian z^ = a exp(-xi^2/w^2) scaled so |||z||| = delta.
Perturbation scaled_perturbation(double delta, double width, std::size_t grid_size, double max_frequency);

using ProfileSource = std::function<std::shared_ptr<const SelfSimilarProfile>(double c, double alpha)>;

/// Runs the configured experiment, writes CSV/JSON into output_dir and returns
/// the report. Module errors are captured per check.
RunReport run_experiment(const ExperimentConfig& cfg, const ProfileSource& profiles = {});

// Individual measurements, shared with the acceptance driver.

struct GaugeRow {
    std::string profile;
    double t = 0.0, xi = 0.0, xi3t = 0.0, gauge = 0.0;
};
/// |N - N_lead| (xi^3 t)^{5/6} <xi^3 t>^{1/4} / (xi^3 |u|_E^3) over a lattice with xi^3 t in [0.1, 1e3].
std::vector<GaugeRow> remainder_gauge_table(const SelfSimilarProfile& S, double gaussian_e_norm = 0.05);

struct KernelRow {
    double sigma = 0.0, coarse = 0.0, fine = 0.0;  // sigma^{1/2} |K|
};
std::vector<KernelRow> kernel_table(const SelfSimilarProfile& S, double n_cut, double h);

/// sup_x |e^{-t d^3} z| max(1, t^{1/3} <x/t^{1/3}>^{1/4}) / |||z||| per t.
std::vector<std::pair<double, double>> dispersion_table(const Perturbation& z, const rvec& times);

/// sup_x |F^{-1}(xi I^S)| for the exact (spectral d_xi, equation d_t) or the
/// truncated (chain rule for the cutoff) family at time t.
double i_cancellation(const SelfSimilarProfile& S, double t, double n_cut = 0.0);

/// max |i e^{it xi^3} F(I e^{-t d^3} z) - d_xi z^| with I u = x u - 3t u_xx in physical space.
double linear_source_identity(const Perturbation& z, double t);

/// Round-trip and Plancherel defects of the transform on a Gaussian.
struct TransformDefects {
    double round_trip = 0.0, plancherel = 0.0, airy_unitarity = 0.0;
};
TransformDefects transform_defects();

nlohmann::json read_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace mkdv::harness
