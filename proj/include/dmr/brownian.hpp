#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dmr/time_grid.hpp"

namespace dmr {

// N simulated d-dimensional Brownian paths on the grid. Increments are
// i.i.d. Gaussian with variance dt per component; paths are the cumulative
// sums with B_0 = 0.
struct BrownianEnsemble {
    TimeGrid grid;
    std::size_t d = 1;
    std::size_t n_particles = 0;
    std::uint64_t seed = 0;
    // paths: (n_nodes) x N x d, row-major; increments: (n_steps) x N x d.
    std::vector<double> paths;
    std::vector<double> increments;

    std::span<const double> at(std::size_t k, std::size_t i) const {
        return {paths.data() + (k * n_particles + i) * d, d};
    }
    std::span<const double> increment(std::size_t k, std::size_t i) const {
        return {increments.data() + (k * n_particles + i) * d, d};
    }
    bool same_shape(const BrownianEnsemble& other) const {
        return grid == other.grid && d == other.d && n_particles == other.n_particles;
    }
};

BrownianEnsemble simulate_brownian(const TimeGrid& grid, std::size_t d,
                                   std::size_t n_particles, std::uint64_t seed);

}  // namespace dmr
