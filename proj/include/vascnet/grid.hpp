#pragma once

#include <cstddef>

#include "vascnet/errors.hpp"

namespace vascnet {

/// Uniform discretization of the truncated half-line [0, L]: N finite-volume
/// cells with centers x_i = (i + 1/2) dx, plus node points x_j = j dx used by
/// profile sampling and residual stencils.
class HalfLineGrid {
public:
    HalfLineGrid(double length, std::size_t cells) : L_(length), N_(cells) {
        if (!(length > 0.0)) throw InvalidInput("HalfLineGrid: length must be positive");
        if (cells < 16) throw InvalidInput("HalfLineGrid: need at least 16 cells");
    }

    double length() const noexcept { return L_; }
    std::size_t cells() const noexcept { return N_; }
    std::size_t nodes() const noexcept { return N_ + 1; }
    double dx() const noexcept { return L_ / static_cast<double>(N_); }

    double center(std::size_t i) const noexcept {
        return (static_cast<double>(i) + 0.5) * dx();
    }
    double node(std::size_t j) const noexcept { return static_cast<double>(j) * dx(); }

    bool operator==(const HalfLineGrid& other) const noexcept {
        return L_ == other.L_ && N_ == other.N_;
    }

private:
    double L_;
    std::size_t N_;
};

} // namespace vascnet
