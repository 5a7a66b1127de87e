#include "mkdv/harness/config.hpp"

#include <zlib.h>

#include <cmath>
#include <fstream>
#include <set>

namespace mkdv::harness {

namespace {
const std::pair<ExperimentKind, const char*> kKinds[] = {
    {ExperimentKind::selfsim, "selfsim"}, {ExperimentKind::rates, "rates"},   {ExperimentKind::remainder, "remainder"},
    {ExperimentKind::kernel, "kernel"},   {ExperimentKind::cauchy, "cauchy"}, {ExperimentKind::all, "all"},
};

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    fail(ErrorKind::config, "config field '" + field + "': " + why);
}
}  // namespace

const char* to_string(ExperimentKind k) noexcept {
    for (auto& [kk, name] : kKinds)
        if (kk == k) return name;
    return "?";
}

ExperimentKind kind_from_string(const std::string& s) {
    for (auto& [kk, name] : kKinds)
        if (s == name) return kk;
    if (s == "selfsim-build") return ExperimentKind::selfsim;
    bad("kind", "unknown experiment kind '" + s + "'");
}

void ExperimentConfig::validate() const {
    if (!std::isfinite(c) || !std::isfinite(alpha)) bad("c", "must be finite");
    if (std::abs(c) + std::abs(alpha) > 0.1) bad("c", "|c| + |alpha| must be <= 0.1");
    if (!(delta >= 0.0) || delta > 0.05) bad("delta", "must lie in [0, 0.05]");
    if (!(z_width > 0.0)) bad("z_width", "must be > 0");
    if (!(n > 0.0)) bad("n", "must be > 0");
    if (n_list.size() < 2) bad("n_list", "needs at least two entries");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (!(n_list[i] > 0.0)) bad("n_list", "entries must be > 0");
        if (i > 0 && !(n_list[i] > n_list[i - 1])) bad("n_list", "must be strictly increasing");
    }
    if (grid_size < 64 || (grid_size & (grid_size - 1)) != 0) bad("grid_size", "must be a power of two >= 64");
    if (!(max_frequency > 0.0)) bad("max_frequency", "must be > 0");
    if (!(t_lo > 0.0) || !(t_hi > t_lo)) bad("t_lo", "need 0 < t_lo < t_hi");
    if (!(t_probe > 0.0)) bad("t_probe", "must be > 0");
    if (!(gamma >= 1.0)) bad("gamma", "must be >= 1");
    if (mesh_nodes < 8) bad("mesh_nodes", "must be >= 8");
    if (!(rtol > 0.0) || rtol > 1e-2) bad("rtol", "must lie in (0, 1e-2]");
    if (!(quad_tol > 0.0) || quad_tol > 1e-2) bad("quad_tol", "must lie in (0, 1e-2]");
    if (output_dir.empty()) bad("output_dir", "must not be empty");
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail(ErrorKind::config, "config must be a JSON object");
    static const std::set<std::string> known{"kind",    "c",          "alpha",        "delta",     "z_width",
                                             "n",       "n_list",     "grid_size",    "max_frequency",
                                             "t_lo",    "t_hi",       "t_probe",      "gamma",     "mesh_nodes",
                                             "rtol",    "quad_tol",   "output_dir",   "baseline_dir", "freeze"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) bad(it.key(), "unknown key");
    ExperimentConfig c;
    try {
        if (j.contains("kind")) c.kind = kind_from_string(j.at("kind").get<std::string>());
        auto num = [&](const char* k, double& v) {
            if (j.contains(k)) v = j.at(k).get<double>();
        };
        num("c", c.c);
        num("alpha", c.alpha);
        num("delta", c.delta);
        num("z_width", c.z_width);
        num("n", c.n);
        num("max_frequency", c.max_frequency);
        num("t_lo", c.t_lo);
        num("t_hi", c.t_hi);
        num("t_probe", c.t_probe);
        num("gamma", c.gamma);
        num("rtol", c.rtol);
        num("quad_tol", c.quad_tol);
        if (j.contains("n_list")) c.n_list = j.at("n_list").get<rvec>();
        if (j.contains("grid_size")) c.grid_size = j.at("grid_size").get<std::size_t>();
        if (j.contains("mesh_nodes")) c.mesh_nodes = j.at("mesh_nodes").get<std::size_t>();
        if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("baseline_dir")) c.baseline_dir = j.at("baseline_dir").get<std::string>();
        if (j.contains("freeze")) c.freeze = j.at("freeze").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::config, std::string("config type error: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::config, "config " + path + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
    return {{"kind", to_string(kind)},   {"c", c},
            {"alpha", alpha},            {"delta", delta},
            {"z_width", z_width},        {"n", n},
            {"n_list", n_list},          {"grid_size", grid_size},
            {"max_frequency", max_frequency}, {"t_lo", t_lo},
            {"t_hi", t_hi},              {"t_probe", t_probe},
            {"gamma", gamma},            {"mesh_nodes", mesh_nodes},
            {"rtol", rtol},              {"quad_tol", quad_tol},
            {"output_dir", output_dir},  {"baseline_dir", baseline_dir},
            {"freeze", freeze}};
}

std::string ExperimentConfig::hash() const {
    auto j = to_json();
    j.erase("output_dir");
    j.erase("baseline_dir");
    j.erase("freeze");
    const std::string s = j.dump();
    const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(s.data()), uInt(s.size()));
    const auto adl = adler32(1L, reinterpret_cast<const Bytef*>(s.data()), uInt(s.size()));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%08lx%08lx", static_cast<unsigned long>(crc), static_cast<unsigned long>(adl));
    return buf;
}

}  // namespace mkdv::harness
