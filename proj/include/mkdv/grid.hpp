#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "mkdv/error.hpp"

namespace mkdv {

using cd = std::complex<double>;
using cvec = std::vector<cd>;
using rvec = std::vector<double>;

/// Symmetric frequency grid on half-integer multiples of the spacing:
///   xi_k = (k - m/2 + 1/2) h,  k = 0..m-1.
/// Zero is never a node; nodes m/2-1 and m/2 straddle it, so a jump at
/// xi = 0 is representable without special cases.
class FrequencyGrid {
public:
    FrequencyGrid() = default;

    static FrequencyGrid uniform(std::size_t m, double h);
    /// Chooses h so the outermost node sits at (m-1)/2 * h = xi_max.
    static FrequencyGrid with_max(std::size_t m, double xi_max);

    std::size_t size() const noexcept { return m_; }
    double spacing() const noexcept { return h_; }
    double max_frequency() const noexcept { return (0.5 * double(m_) - 0.5) * h_; }
    double node(std::size_t k) const noexcept { return (double(k) - 0.5 * double(m_) + 0.5) * h_; }
    const rvec& nodes() const noexcept { return xi_; }

    /// Index of the first positive node.
    std::size_t first_positive() const noexcept { return m_ / 2; }
    /// Mirror index: node(mirror(k)) == -node(k).
    std::size_t mirror(std::size_t k) const noexcept { return m_ - 1 - k; }

    /// Physical period of the dual (anti-periodic) space grid, 2 pi / h.
    double period() const noexcept;
    double dx() const noexcept { return period() / double(m_); }

    std::uint64_t hash() const noexcept;

    friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) noexcept {
        return a.m_ == b.m_ && a.h_ == b.h_;
    }

private:
    FrequencyGrid(std::size_t m, double h);
    std::size_t m_ = 0;
    double h_ = 0.0;
    rvec xi_;
};

/// Uniform physical grid x_j = (j - m/2) dx dual to a FrequencyGrid.
class SpaceGrid {
public:
    SpaceGrid() = default;
    explicit SpaceGrid(const FrequencyGrid& g);
    SpaceGrid(std::size_t m, double dx);

    std::size_t size() const noexcept { return m_; }
    double dx() const noexcept { return dx_; }
    double node(std::size_t j) const noexcept { return (double(j) - 0.5 * double(m_)) * dx_; }
    const rvec& nodes() const noexcept { return x_; }
    double length() const noexcept { return dx_ * double(m_); }
    /// Frequency grid whose DFT pairs with this grid.
    FrequencyGrid dual() const;

    friend bool operator==(const SpaceGrid& a, const SpaceGrid& b) noexcept {
        return a.m_ == b.m_ && a.dx_ == b.dx_;
    }

private:
    std::size_t m_ = 0;
    double dx_ = 0.0;
    rvec x_;
};

}  // namespace mkdv
