#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mkdv/harness/cache.hpp"
#include "mkdv/harness/config.hpp"
#include "mkdv/harness/experiments.hpp"
#include "mkdv/harness/report.hpp"

using namespace mkdv;
using namespace mkdv::harness;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("mkdv_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}
std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::precondition;  // not thrown
}
}  // namespace

TEST_CASE("config validation names the offending field") {
    ExperimentConfig cfg;
    cfg.delta = 0.5;
    try {
        cfg.validate();
        FAIL("expected a config error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
        CHECK(std::string(e.what()).find("delta") != std::string::npos);
    }
    cfg = {};
    cfg.grid_size = 1000;
    CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::config);
    cfg = {};
    cfg.n_list = {8, 4};
    CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::config);
    CHECK_NOTHROW(ExperimentConfig{}.validate());
}

TEST_CASE("config json round trip and unknown keys") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::rates;
    cfg.c = 0.03;
    cfg.n_list = {2, 4};
    const auto back = ExperimentConfig::from_json(cfg.to_json());
    CHECK(back.kind == ExperimentKind::rates);
    CHECK(back.c == 0.03);
    CHECK(back.n_list == cfg.n_list);
    CHECK(back.hash() == cfg.hash());
    auto changed = cfg;
    changed.output_dir = "elsewhere";
    CHECK(changed.hash() == cfg.hash());
    changed.delta = 0.04;
    CHECK(changed.hash() != cfg.hash());

    auto j = cfg.to_json();
    j["detla"] = 0.01;
    CHECK(kind_of([&] { ExperimentConfig::from_json(j); }) == ErrorKind::config);
}

TEST_CASE("profile cache round trip, corruption and purge") {
    const auto root = scratch("cache");
    ProfileCache pc(root.string());
    const auto key = ProfileCache::key(0.03, 0.0);
    CHECK(pc.verify(key) == ProfileCache::Status::absent);
    CHECK(pc.purge(key) == ProfileCache::Status::absent);
    CHECK(pc.build(0.03, 0.0) == ProfileCache::Status::built);
    CHECK(pc.build(0.03, 0.0) == ProfileCache::Status::present);
    CHECK(pc.verify(key) == ProfileCache::Status::verified);

    const auto S = pc.load(key);
    const auto ref = build_selfsimilar(0.03, 0.0);
    for (double eta : {0.01, 0.5, 2.0, 7.0}) CHECK(std::abs(S->eval(eta) - ref.eval(eta)) < 1e-12);

    // flip one bit in the payload
    {
        std::fstream f(pc.path(key), std::ios::in | std::ios::out | std::ios::binary);
        f.seekg(200);
        char b = 0;
        f.read(&b, 1);
        b ^= 0x10;
        f.seekp(200);
        f.write(&b, 1);
    }
    CHECK(kind_of([&] { pc.verify(key); }) == ErrorKind::corruption);
    CHECK(kind_of([&] { pc.load(key); }) == ErrorKind::corruption);
    CHECK(pc.load_or_build(0.03, 0.0)->c == 0.03);  // rebuilt
    CHECK(pc.verify(key) == ProfileCache::Status::verified);
    CHECK(pc.purge(key) == ProfileCache::Status::purged);
    CHECK(pc.verify(key) == ProfileCache::Status::absent);
    fs::remove_all(root);
}

TEST_CASE("report json round trip") {
    RunReport r;
    r.kind = "kernel";
    r.config_hash = "abc";
    r.environment = environment_fingerprint();
    r.add({"a.b", 1.5, 2.0, "<=", true, "oracle", "note"});
    r.add({"a.c", NAN, 0.0, "info", false, "baseline", ""});
    const auto j = r.to_json();
    CHECK(j.at("schema_version") == kReportSchemaVersion);
    CHECK(j.at("checks")[1].at("measured").is_null());
    const auto back = RunReport::from_json(j);
    REQUIRE(back.checks.size() == 2);
    CHECK(back.checks[0].measured == 1.5);
    CHECK(std::isnan(back.checks[1].measured));
    CHECK(back.checks[0].note == "note");
    CHECK_FALSE(back.all_pass());
}

TEST_CASE("csv output is deterministic below the header line") {
    const auto dir = scratch("csv");
    for (const char* name : {"a.csv", "b.csv"}) {
        CsvWriter w((dir / name).string(), {"t", "v"});
        w.row({0.1, 1.0 / 3.0});
        w.row("x", {2.0});
    }
    auto body = [&](const char* name) {
        const auto s = slurp(dir / name);
        CHECK(s.rfind("# mkdv", 0) == 0);
        return s.substr(s.find('\n') + 1);
    };
    CHECK(body("a.csv") == body("b.csv"));
    CHECK(body("a.csv").find("3.333333333333e-01") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("rates with zero perturbation is a trivial pass") {
    const auto dir = scratch("rates0");
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::rates;
    cfg.c = 0.0;
    cfg.delta = 0.0;
    cfg.mesh_nodes = 24;
    cfg.output_dir = dir.string();
    const auto rep = run_experiment(cfg, [](double c, double a) {
        return std::make_shared<const SelfSimilarProfile>(build_selfsimilar(c, a));
    });
    const auto manifest = suite_manifest(ExperimentKind::rates);
    REQUIRE(rep.checks.size() == manifest.size());
    for (const auto& c : rep.checks) CHECK_MESSAGE(c.pass, c.name);
    CHECK(fs::exists(dir / "report_rates.json"));
    CHECK(fs::exists(dir / "decay_series.csv"));
    fs::remove_all(dir);
}

TEST_CASE("suite manifest of 'all' is the union plus identities") {
    const auto all = suite_manifest(ExperimentKind::all);
    std::size_t n = 4;
    for (auto k : {ExperimentKind::selfsim, ExperimentKind::rates, ExperimentKind::remainder, ExperimentKind::kernel,
                   ExperimentKind::cauchy})
        n += suite_manifest(k).size();
    CHECK(all.size() == n);
}

TEST_CASE("identities hold on the default profile") {
    const auto S = build_selfsimilar(0.05, 0.0);
    const auto d = transform_defects();
    CHECK(d.round_trip < 1e-10);
    CHECK(d.plancherel < 1e-10);
    CHECK(d.airy_unitarity < 1e-10);
    auto z = scaled_perturbation(0.05, 1.0, 4096, 10.0);
    CHECK(linear_source_identity(z, 0.1) < 1e-8);
    CHECK(i_cancellation(S, 0.5) < 5e-8);
    CHECK(i_cancellation(S, 0.5, 8.0) < 5e-8);
}
