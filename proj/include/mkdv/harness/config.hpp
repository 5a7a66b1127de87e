#pragma once

#include <string>

#include <json.hpp>

#include "mkdv/grid.hpp"

namespace mkdv::harness {

enum class ExperimentKind { selfsim, rates, remainder, kernel, cauchy, all };
const char* to_string(ExperimentKind k) noexcept;
ExperimentKind kind_from_string(const std::string& s);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::all;
    double c = 0.05;
    double alpha = 0.0;
    double delta = 0.05;            // |||z|||
    double z_width = 1.0;           // z^ = a exp(-xi^2 / width^2)
    double n = 8.0;                 // rates run
    rvec n_list{4.0, 8.0, 16.0};    // Cauchy study
    std::size_t grid_size = 4096;   // perturbation / kernel grid, power of two
    double max_frequency = 10.0;
    double t_lo = 1e-3;
    double t_hi = 1e-1;
    double t_probe = 1.0;
    double gamma = 3.0;
    std::size_t mesh_nodes = 96;
    double rtol = 1e-6;
    double quad_tol = 1e-8;
    std::string output_dir = "mkdv-out";
    std::string baseline_dir;       // empty: no regression comparison
    bool freeze = false;            // write baselines instead of comparing

    /// Throws ErrorKind::config naming the offending field.
    void validate() const;
    /// Unknown keys are rejected.
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);
    nlohmann::json to_json() const;
    /// Hash of the canonical JSON without output locations.
    std::string hash() const;
};

}  // namespace mkdv::harness
