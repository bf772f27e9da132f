#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dmr/brownian.hpp"
#include "dmr/measure.hpp"

namespace dmr {

enum class Regularity { lipschitz, mao };

// Generator f(t, y, law(Y), z, law(Z)). For mao generators, rho carries the
// concave modulus so its structural properties can be sampled.
struct GeneratorSpec {
    std::string name;
    std::function<double(double t, double y, const EmpiricalMeasure& mu,
                         std::span<const double> z, const EmpiricalMeasure& nu)>
        evaluator;
    Regularity regularity = Regularity::lipschitz;
    double lambda = 0.0;
    double beta = 0.0;
    std::function<double(double)> rho;  // mao generators only
};

struct TerminalFunctional {
    std::string name;
    std::function<double(std::span<const double> terminal_state)> evaluator;
};

// Particle-wise (Y, Z) arrays from a backward solve, node-major.
struct BackwardSolution {
    TimeGrid grid;
    std::size_t d = 1;
    std::size_t n_particles = 0;
    std::vector<double> Y;  // (n_nodes) x N
    std::vector<double> Z;  // (n_nodes) x N x d
    int basis_degree = 0;
    std::vector<double> regression_residuals;  // one per backward step

    double& y(std::size_t k, std::size_t i) { return Y[k * n_particles + i]; }
    double y(std::size_t k, std::size_t i) const { return Y[k * n_particles + i]; }
    std::span<const double> z(std::size_t k, std::size_t i) const {
        return {Z.data() + (k * n_particles + i) * d, d};
    }
    std::span<double> z(std::size_t k, std::size_t i) {
        return {Z.data() + (k * n_particles + i) * d, d};
    }
    std::span<const double> y_at(std::size_t k) const {
        return {Y.data() + k * n_particles, n_particles};
    }
    bool same_shape(const BackwardSolution& other) const {
        return grid == other.grid && d == other.d && n_particles == other.n_particles;
    }
};

// Per-particle driver used inside the backward loop. y_hat is the regression
// estimate of the conditional mean of Y at the node; mu is its empirical law
// and nu the law of Z there. A plain generator ignores the particle index; a
// frozen generator ignores (y_hat, mu) and substitutes its stored iterate.
using DriverFn = std::function<double(std::size_t k, std::size_t particle,
                                      double y_hat, const EmpiricalMeasure& mu,
                                      std::span<const double> z,
                                      const EmpiricalMeasure& nu)>;

// Backward explicit Euler with regression Monte Carlo conditional
// expectations. Throws RegressionSingular / NonFiniteValue.
BackwardSolution solve_backward(const BrownianEnsemble& ensemble,
                                const DriverFn& driver,
                                const TerminalFunctional& terminal,
                                int basis_degree);

BackwardSolution solve_mfbsde(const BrownianEnsemble& ensemble,
                              const GeneratorSpec& generator,
                              const TerminalFunctional& terminal,
                              int basis_degree);

// Empirical ingredients of the a priori stability estimate. No inequality is
// asserted; the constant in the estimate is not computable.
struct GapReport {
    double sup_y_gap_sq = 0.0;     // max_k mean_i |dY|^2
    double z_gap_sq = 0.0;         // sum_k mean_i |dZ|^2 dt
    double terminal_gap_sq = 0.0;  // mean |d xi|^2
    double driver_gap_sq = 0.0;    // sum_k mean_i |df|^2 dt along solution 1
    double ratio = 0.0;            // (sup_y + z) / (terminal + driver)
};

GapReport stability_gap(const BackwardSolution& sol1, const BackwardSolution& sol2,
                        const GeneratorSpec& gen1, const GeneratorSpec& gen2,
                        const TerminalFunctional& term1,
                        const TerminalFunctional& term2,
                        const BrownianEnsemble& ensemble);

// Sampled structural checks on a mao modulus (continuity is assumed):
// rho(0) = 0, nondecreasing, midpoint-concave, rho(r) <= beta (1 + r).
bool validate_mao_modulus(const GeneratorSpec& generator,
                          std::span<const double> sample_points);

}  // namespace dmr
