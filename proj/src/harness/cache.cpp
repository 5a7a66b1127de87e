#include "mkdv/harness/cache.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mkdv::harness {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'M', 'K', 'D', 'V', 'P', 'R', 'O', 'F'};

struct Writer {
    std::string buf;
    template <class T>
    void put(const T& v) {
        buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
    }
};

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;
    template <class T>
    T get() {
        require(pos + sizeof(T) <= buf.size(), ErrorKind::corruption, "cache file truncated");
        T v;
        std::memcpy(&v, buf.data() + pos, sizeof(T));
        pos += sizeof(T);
        return v;
    }
};

void put_options(Writer& w, const ShootingOptions& o) {
    for (double v : {o.y_right, o.dy, o.y_left, o.taper, o.guard, o.rtol, o.atol, o.secant_y_left, o.c_tol,
                     o.small_bound})
        w.put(v);
    w.put(std::int32_t(o.max_secant));
}

ShootingOptions get_options(Reader& r) {
    ShootingOptions o;
    for (double* p : {&o.y_right, &o.dy, &o.y_left, &o.taper, &o.guard, &o.rtol, &o.atol, &o.secant_y_left, &o.c_tol,
                      &o.small_bound})
        *p = r.get<double>();
    o.max_secant = r.get<std::int32_t>();
    return o;
}

std::uint32_t checksum(const std::string& s, std::size_t n) {
    return std::uint32_t(crc32(0L, reinterpret_cast<const Bytef*>(s.data()), uInt(n)));
}

std::string hex_double(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%a", v);
    std::string s = b;
    for (auto& ch : s)
        if (ch == '.' || ch == '+' || ch == '-') ch = ch == '-' ? 'm' : (ch == '+' ? 'p' : 'd');
    return s;
}

}  // namespace

void write_profile(const std::string& path, const SelfSimilarProfile& S) {
    Writer w;
    w.buf.append(kMagic, sizeof kMagic);
    w.put(kCacheFormatVersion);
    w.put(S.c);
    w.put(S.alpha);
    w.put(S.k);
    put_options(w, S.options);
    w.put(std::uint64_t(S.V.grid.size()));
    w.put(S.V.grid.dx());
    for (const auto& v : S.V.values) w.put(v.real());
    w.put(checksum(w.buf, w.buf.size()));
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) fail(ErrorKind::io, "cannot write cache file " + tmp);
        out.write(w.buf.data(), std::streamsize(w.buf.size()));
        if (!out) fail(ErrorKind::io, "short write to " + tmp);
    }
    fs::rename(tmp, path);
}

namespace {
struct RawProfile {
    double c, alpha, k;
    ShootingOptions opt;
    SpaceField V;
};

RawProfile read_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open cache file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string buf = ss.str();
    require(buf.size() > sizeof kMagic + 4, ErrorKind::corruption, "cache file too short: " + path);
    std::uint32_t stored;
    std::memcpy(&stored, buf.data() + buf.size() - 4, 4);
    if (stored != checksum(buf, buf.size() - 4)) fail(ErrorKind::corruption, "checksum mismatch in " + path);
    require(std::memcmp(buf.data(), kMagic, sizeof kMagic) == 0, ErrorKind::corruption, "bad magic in " + path);
    Reader r{buf, sizeof kMagic};
    const auto ver = r.get<std::uint32_t>();
    require(ver == kCacheFormatVersion, ErrorKind::corruption,
            "cache format version " + std::to_string(ver) + " unsupported in " + path);
    RawProfile p;
    p.c = r.get<double>();
    p.alpha = r.get<double>();
    p.k = r.get<double>();
    p.opt = get_options(r);
    const auto m = r.get<std::uint64_t>();
    const double dx = r.get<double>();
    require(m >= 4 && m < (1ull << 30) && dx > 0.0, ErrorKind::corruption, "bad grid in " + path);
    cvec v(m);
    for (auto& x : v) x = r.get<double>();
    require(r.pos + 4 == buf.size(), ErrorKind::corruption, "trailing bytes in " + path);
    p.V = SpaceField(SpaceGrid(std::size_t(m), dx), std::move(v), 1.0, true);
    return p;
}
}  // namespace

SelfSimilarProfile read_profile(const std::string& path) {
    RawProfile p = read_raw(path);
    return assemble_selfsimilar(p.c, p.alpha, p.k, std::move(p.V), p.opt);
}

std::string ProfileCache::default_root(const std::string& fallback) {
    if (const char* e = std::getenv("MKDV_CACHE_DIR"); e && *e) return e;
    return fallback;
}

ProfileCache::ProfileCache(std::string root) : root_(std::move(root)) {}

std::string ProfileCache::key(double c, double alpha, const ShootingOptions& opt) {
    Writer w;
    put_options(w, opt);
    char b[16];
    std::snprintf(b, sizeof b, "%08x", checksum(w.buf, w.buf.size()));
    return "selfsim_c" + hex_double(c) + "_a" + hex_double(alpha) + "_o" + b;
}

std::string ProfileCache::path(const std::string& key) const { return (fs::path(root_) / (key + ".bin")).string(); }

const char* ProfileCache::to_string(Status s) noexcept {
    switch (s) {
        case Status::built: return "built";
        case Status::present: return "present";
        case Status::verified: return "verified";
        case Status::purged: return "purged";
        case Status::absent: return "absent";
    }
    return "?";
}

ProfileCache::Status ProfileCache::build(double c, double alpha, const ShootingOptions& opt) {
    const std::string p = path(key(c, alpha, opt));
    if (fs::exists(p)) return Status::present;
    write_profile(p, build_selfsimilar(c, alpha, opt));
    return Status::built;
}

ProfileCache::Status ProfileCache::verify(const std::string& key) const {
    const std::string p = path(key);
    if (!fs::exists(p)) return Status::absent;
    const SelfSimilarProfile S = read_profile(p);
    // invariant suite on the reloaded profile
    const double ode = ode_residual(S.V, S.alpha, -50.0, 10.0);
    if (!(ode < 1e-8)) fail(ErrorKind::corruption, "cached profile fails the ODE check (residual " + std::to_string(ode) + ")");
    if (!S.trivial()) {
        const double plateau = S.eval(1e-4).real();
        if (std::abs(plateau - S.c) > 1e-6)
            fail(ErrorKind::corruption, "cached profile plateau " + std::to_string(plateau) + " != c");
        const double r = selfsim_residual(S, 0.5, 0.501, {0.25, 0.5, 1.0, 1.5, 2.0});
        if (!(r < 1e-6)) fail(ErrorKind::corruption, "cached profile is not self-similar (" + std::to_string(r) + ")");
    }
    return Status::verified;
}

ProfileCache::Status ProfileCache::purge(const std::string& key) const {
    const std::string p = path(key);
    if (!fs::exists(p)) return Status::absent;
    fs::remove(p);
    return Status::purged;
}

std::shared_ptr<const SelfSimilarProfile> ProfileCache::load(const std::string& key) const {
    return std::make_shared<const SelfSimilarProfile>(read_profile(path(key)));
}

std::shared_ptr<const SelfSimilarProfile> ProfileCache::load_or_build(double c, double alpha, const ShootingOptions& opt) {
    const std::string k = key(c, alpha, opt);
    const std::string p = path(k);
    if (fs::exists(p)) {
        try {
            return load(k);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::corruption) throw;
            fs::remove(p);  // rebuild a corrupted entry
        }
    }
    auto S = std::make_shared<const SelfSimilarProfile>(build_selfsimilar(c, alpha, opt));
    write_profile(p, *S);
    return S;
}

}  // namespace mkdv::harness
