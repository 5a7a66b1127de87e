#include "mkdv/grid.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace mkdv {

FrequencyGrid::FrequencyGrid(std::size_t m, double h) : m_(m), h_(h), xi_(m) {
    for (std::size_t k = 0; k < m; ++k) xi_[k] = node(k);
}

FrequencyGrid FrequencyGrid::uniform(std::size_t m, double h) {
    require(m >= 4 && m % 2 == 0, ErrorKind::invalid_argument, "frequency grid needs an even node count >= 4");
    require(h > 0.0 && std::isfinite(h), ErrorKind::invalid_argument, "frequency spacing must be positive");
    return FrequencyGrid(m, h);
}

FrequencyGrid FrequencyGrid::with_max(std::size_t m, double xi_max) {
    require(xi_max > 0.0, ErrorKind::invalid_argument, "max frequency must be positive");
    return uniform(m, xi_max / (0.5 * double(m) - 0.5));
}

double FrequencyGrid::period() const noexcept { return 2.0 * std::numbers::pi / h_; }

std::uint64_t FrequencyGrid::hash() const noexcept {
    // FNV-1a over (m, bits of h)
    std::uint64_t x = 1469598103934665603ull;
    auto mix = [&x](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            x ^= (v >> (8 * i)) & 0xffu;
            x *= 1099511628211ull;
        }
    };
    mix(m_);
    mix(std::bit_cast<std::uint64_t>(h_));
    return x;
}

SpaceGrid::SpaceGrid(std::size_t m, double dx) : m_(m), dx_(dx), x_(m) {
    require(m >= 4 && m % 2 == 0 && dx > 0.0, ErrorKind::invalid_argument, "bad space grid");
    for (std::size_t j = 0; j < m; ++j) x_[j] = node(j);
}

SpaceGrid::SpaceGrid(const FrequencyGrid& g) : SpaceGrid(g.size(), g.dx()) {}

FrequencyGrid SpaceGrid::dual() const {
    return FrequencyGrid::uniform(m_, 2.0 * std::numbers::pi / (double(m_) * dx_));
}

}  // namespace mkdv
