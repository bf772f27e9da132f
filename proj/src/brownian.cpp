#include "dmr/brownian.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace dmr {

namespace {

// Box-Muller on top of mt19937_64 so the stream is identical across
// standard library implementations (std::normal_distribution is not).
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    double uniform01() {
        // 53-bit mantissa, shifted into (0, 1] so the log is safe.
        const std::uint64_t bits = rng_() >> 11;
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace

BrownianEnsemble simulate_brownian(const TimeGrid& grid, std::size_t d,
                                   std::size_t n_particles, std::uint64_t seed) {
    if (n_particles < 2) throw std::invalid_argument("simulate_brownian: need at least 2 particles");
    if (d < 1) throw std::invalid_argument("simulate_brownian: d must be >= 1");

    BrownianEnsemble ens;
    ens.grid = grid;
    ens.d = d;
    ens.n_particles = n_particles;
    ens.seed = seed;

    const std::size_t n_steps = grid.n_steps;
    const std::size_t stride = n_particles * d;
    ens.increments.resize(n_steps * stride);
    ens.paths.assign((n_steps + 1) * stride, 0.0);

    NormalStream normals(seed);
    const double vol = std::sqrt(grid.dt());
    for (double& v : ens.increments) v = vol * normals.next();

    for (std::size_t k = 0; k < n_steps; ++k) {
        const double* prev = ens.paths.data() + k * stride;
        const double* inc = ens.increments.data() + k * stride;
        double* next = ens.paths.data() + (k + 1) * stride;
        for (std::size_t j = 0; j < stride; ++j) next[j] = prev[j] + inc[j];
    }
    return ens;
}

}  // namespace dmr
