#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dmr/brownian.hpp"

namespace dmr {

// Least-squares projection onto a polynomial basis in the Brownian state at
// one grid node (all monomials of total degree <= degree in the d
// components). Used for every conditional expectation in the backward
// schemes. At nodes where the state is degenerate (t = 0) the basis
// collapses to the constant, i.e. a plain sample average.
class PolynomialRegression {
public:
    PolynomialRegression(const BrownianEnsemble& ensemble, std::size_t node,
                         int degree);

    struct Fit {
        std::vector<double> fitted;  // one value per particle
        double residual_rms = 0.0;
    };

    // Throws RegressionSingular if the normal equations are rank-deficient.
    Fit fit(std::span<const double> targets) const;

    std::size_t basis_size() const { return n_basis_; }

private:
    std::size_t n_particles_ = 0;
    std::size_t n_basis_ = 0;
    std::vector<double> design_;       // n_particles x n_basis, column-scaled
    std::vector<double> column_scale_;
};

}  // namespace dmr
