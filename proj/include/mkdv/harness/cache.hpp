#pragma once

#include <memory>
#include <string>

#include "mkdv/selfsimilar.hpp"

namespace mkdv::harness {

inline constexpr std::uint32_t kCacheFormatVersion = 2;

/// Self-similar profiles stored as V on its space grid plus the shooting
/// parameters; the frequency side is rebuilt on load. Files end in a CRC32 of
/// everything before it.
class ProfileCache {
public:
    /// Root from MKDV_CACHE_DIR, else `fallback`.
    static std::string default_root(const std::string& fallback = "mkdv-cache");
    explicit ProfileCache(std::string root);

    static std::string key(double c, double alpha, const ShootingOptions& opt = {});
    std::string path(const std::string& key) const;

    enum class Status { built, present, verified, purged, absent };
    static const char* to_string(Status s) noexcept;

    Status build(double c, double alpha, const ShootingOptions& opt = {});
    /// Checksum + invariant suite; throws ErrorKind::corruption on mismatch.
    Status verify(const std::string& key) const;
    Status purge(const std::string& key) const;

    std::shared_ptr<const SelfSimilarProfile> load(const std::string& key) const;
    std::shared_ptr<const SelfSimilarProfile> load_or_build(double c, double alpha, const ShootingOptions& opt = {});

private:
    std::string root_;
};

void write_profile(const std::string& path, const SelfSimilarProfile& S);
SelfSimilarProfile read_profile(const std::string& path);

}  // namespace mkdv::harness
