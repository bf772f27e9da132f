#pragma once

#include <cstddef>
#include <stdexcept>

namespace dmr {

// Uniform partition of [0, T], shared by every path-indexed object.
struct TimeGrid {
    double horizon = 1.0;
    std::size_t n_steps = 1;

    TimeGrid() = default;
    TimeGrid(double T, std::size_t n) : horizon(T), n_steps(n) {
        if (T <= 0.0) throw std::invalid_argument("TimeGrid: horizon must be positive");
        if (n == 0) throw std::invalid_argument("TimeGrid: n_steps must be positive");
    }

    double dt() const { return horizon / static_cast<double>(n_steps); }
    std::size_t n_nodes() const { return n_steps + 1; }
    double t(std::size_t k) const {
        return static_cast<double>(k) * horizon / static_cast<double>(n_steps);
    }

    bool operator==(const TimeGrid&) const = default;
};

}  // namespace dmr
