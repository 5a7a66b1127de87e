// mkdv: run experiments, manage the profile cache, summarize reports.
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "mkdv/harness/cache.hpp"
#include "mkdv/harness/config.hpp"
#include "mkdv/harness/experiments.hpp"
#include "mkdv/harness/report.hpp"

namespace fs = std::filesystem;
using namespace mkdv;
using namespace mkdv::harness;

namespace {

struct Overrides {
    std::string config_path;
    std::optional<double> c, alpha, delta, n, t_lo, t_hi, t_probe, rtol;
    std::optional<std::size_t> grid_size, mesh_nodes;
    std::vector<double> n_list;
    std::string output_dir, baseline_dir;
    bool freeze = false;
};

void add_common(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--c", o.c, "plateau value S~(0+)");
    sub->add_option("--alpha", o.alpha, "log-shift coefficient");
    sub->add_option("--delta", o.delta, "|||z|||");
    sub->add_option("--n", o.n, "truncation parameter");
    sub->add_option("--n-list", o.n_list, "truncation parameters for the Cauchy study");
    sub->add_option("--t-lo", o.t_lo);
    sub->add_option("--t-hi", o.t_hi);
    sub->add_option("--t-probe", o.t_probe);
    sub->add_option("--rtol", o.rtol);
    sub->add_option("--grid-size", o.grid_size);
    sub->add_option("--mesh-nodes", o.mesh_nodes);
    sub->add_option("-o,--output", o.output_dir, "output directory");
    sub->add_option("--baselines", o.baseline_dir, "baseline directory for regression checks");
    sub->add_flag("--freeze", o.freeze, "write baselines instead of comparing");
}

ExperimentConfig resolve(const Overrides& o, ExperimentKind kind) {
    ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(o.config_path);
    cfg.kind = kind;
    if (o.c) cfg.c = *o.c;
    if (o.alpha) cfg.alpha = *o.alpha;
    if (o.delta) cfg.delta = *o.delta;
    if (o.n) cfg.n = *o.n;
    if (!o.n_list.empty()) cfg.n_list = o.n_list;
    if (o.t_lo) cfg.t_lo = *o.t_lo;
    if (o.t_hi) cfg.t_hi = *o.t_hi;
    if (o.t_probe) cfg.t_probe = *o.t_probe;
    if (o.rtol) cfg.rtol = *o.rtol;
    if (o.grid_size) cfg.grid_size = *o.grid_size;
    if (o.mesh_nodes) cfg.mesh_nodes = *o.mesh_nodes;
    if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
    if (!o.baseline_dir.empty()) cfg.baseline_dir = o.baseline_dir;
    if (o.freeze) cfg.freeze = true;
    cfg.validate();
    return cfg;
}

void print_report(const RunReport& r) {
    for (const auto& c : r.checks)
        std::printf("%-4s %-40s %14.6e %-6s %12.4e  [%s] %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.measured,
                    c.relation.c_str(), c.threshold, c.provenance.c_str(), c.note.c_str());
    std::printf("%s: %s (config %s)\n", r.kind.c_str(), r.all_pass() ? "all checks pass" : "FAILED",
                r.config_hash.c_str());
}

int run(const Overrides& o, ExperimentKind kind) {
    const auto cfg = resolve(o, kind);
    const auto rep = run_experiment(cfg);
    print_report(rep);
    return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-similar mKdV remainder experiments"};
    app.require_subcommand(1);
    Overrides o;
    int rc = 0;

    for (auto kind : {ExperimentKind::selfsim, ExperimentKind::rates, ExperimentKind::remainder, ExperimentKind::kernel,
                      ExperimentKind::cauchy, ExperimentKind::all}) {
        auto* sub = app.add_subcommand(to_string(kind), std::string("run the ") + to_string(kind) + " experiment");
        add_common(sub, o);
        sub->callback([&o, &rc, kind] { rc = run(o, kind); });
    }

    std::vector<std::string> reports;
    auto* rep = app.add_subcommand("report", "summarize report_*.json files");
    rep->add_option("files", reports, "report files or directories")->required();
    rep->callback([&] {
        bool ok = true;
        std::size_t n = 0;
        for (const auto& p : reports) {
            std::vector<fs::path> files;
            if (fs::is_directory(p)) {
                for (const auto& e : fs::directory_iterator(p))
                    if (e.path().filename().string().starts_with("report_") && e.path().extension() == ".json")
                        files.push_back(e.path());
                std::sort(files.begin(), files.end());
            } else {
                files.emplace_back(p);
            }
            for (const auto& f : files) {
                const auto r = RunReport::from_json(read_json(f.string()));
                std::printf("== %s\n", f.string().c_str());
                print_report(r);
                ok = ok && r.all_pass();
                ++n;
            }
        }
        if (n == 0) fail(ErrorKind::io, "no reports found");
        rc = ok ? 0 : 1;
    });

    auto* cache = app.add_subcommand("cache", "self-similar profile cache");
    cache->require_subcommand(1);
    std::string root = ProfileCache::default_root();
    double cc = 0.05, ca = 0.0;
    std::string key;
    cache->add_option("--root", root, "cache directory (default: $MKDV_CACHE_DIR or ./mkdv-cache)");
    auto* build = cache->add_subcommand("build", "build and store a profile");
    build->add_option("--c", cc);
    build->add_option("--alpha", ca);
    build->callback([&] {
        ProfileCache pc(root);
        std::printf("%s %s\n", ProfileCache::key(cc, ca).c_str(), ProfileCache::to_string(pc.build(cc, ca)));
    });
    for (const char* verb : {"verify", "purge"}) {
        auto* s = cache->add_subcommand(verb, std::string(verb) + " a stored profile");
        s->add_option("--key", key, "cache key");
        s->add_option("--c", cc);
        s->add_option("--alpha", ca);
        const std::string v = verb;
        s->callback([&, v] {
            ProfileCache pc(root);
            const std::string k = key.empty() ? ProfileCache::key(cc, ca) : key;
            const auto st = v == "verify" ? pc.verify(k) : pc.purge(k);
            std::printf("%s %s\n", k.c_str(), ProfileCache::to_string(st));
            if (st == ProfileCache::Status::absent && v == "verify") rc = 1;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::fprintf(stderr, "mkdv: %s error: %s\n", to_string(e.kind()), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "mkdv: %s\n", e.what());
        return 2;
    }
    return rc;
}
