#include "dmr/regression.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmr/errors.hpp"

namespace dmr {

namespace {

// Multi-indices with total degree <= degree, in d variables.
std::vector<std::vector<int>> monomial_exponents(std::size_t d, int degree) {
    std::vector<std::vector<int>> out;
    std::vector<int> current(d, 0);
    auto recurse = [&](auto&& self, std::size_t pos, int remaining) -> void {
        if (pos == d) {
            out.push_back(current);
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            current[pos] = e;
            self(self, pos + 1, remaining - e);
        }
        current[pos] = 0;
    };
    recurse(recurse, 0, degree);
    return out;
}

// Cholesky solve of the SPD system A x = b, A given row-major.
std::vector<double> cholesky_solve(std::vector<double> A, std::vector<double> b,
                                   std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double diag = A[j * n + j];
        for (std::size_t k = 0; k < j; ++k) diag -= A[j * n + k] * A[j * n + k];
        if (!(diag > 1e-12))
            throw RegressionSingular("regression: normal equations rank-deficient");
        const double root = std::sqrt(diag);
        A[j * n + j] = root;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = A[i * n + j];
            for (std::size_t k = 0; k < j; ++k) v -= A[i * n + k] * A[j * n + k];
            A[i * n + j] = v / root;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= A[i * n + k] * b[k];
        b[i] = v / A[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double v = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) v -= A[k * n + ii] * b[k];
        b[ii] = v / A[ii * n + ii];
    }
    return b;
}

}  // namespace

PolynomialRegression::PolynomialRegression(const BrownianEnsemble& ensemble,
                                           std::size_t node, int degree) {
    if (degree < 0) throw std::invalid_argument("regression: degree must be >= 0");

    n_particles_ = ensemble.n_particles;
    const std::size_t d = ensemble.d;

    // The state at t = 0 is a point mass; only the constant basis survives.
    const int effective_degree = (node == 0) ? 0 : degree;
    const auto exponents = monomial_exponents(d, effective_degree);
    n_basis_ = exponents.size();
    if (n_particles_ < n_basis_)
        throw RegressionSingular("regression: fewer particles than basis functions");

    design_.resize(n_particles_ * n_basis_);
    for (std::size_t i = 0; i < n_particles_; ++i) {
        const auto state = ensemble.at(node, i);
        for (std::size_t j = 0; j < n_basis_; ++j) {
            double v = 1.0;
            for (std::size_t c = 0; c < d; ++c)
                for (int e = 0; e < exponents[j][c]; ++e) v *= state[c];
            design_[i * n_basis_ + j] = v;
        }
    }

    // Scale columns to unit RMS to keep the Gram matrix well conditioned.
    column_scale_.assign(n_basis_, 1.0);
    for (std::size_t j = 0; j < n_basis_; ++j) {
        double sq = 0.0;
        for (std::size_t i = 0; i < n_particles_; ++i) {
            const double v = design_[i * n_basis_ + j];
            sq += v * v;
        }
        const double rms = std::sqrt(sq / static_cast<double>(n_particles_));
        if (rms > 0.0) {
            column_scale_[j] = rms;
            for (std::size_t i = 0; i < n_particles_; ++i)
                design_[i * n_basis_ + j] /= rms;
        }
    }
}

PolynomialRegression::Fit PolynomialRegression::fit(
    std::span<const double> targets) const {
    if (targets.size() != n_particles_)
        throw std::invalid_argument("regression: target size mismatch");

    std::vector<double> gram(n_basis_ * n_basis_, 0.0);
    std::vector<double> rhs(n_basis_, 0.0);
    for (std::size_t i = 0; i < n_particles_; ++i) {
        const double* row = design_.data() + i * n_basis_;
        for (std::size_t a = 0; a < n_basis_; ++a) {
            rhs[a] += row[a] * targets[i];
            for (std::size_t b = 0; b <= a; ++b) gram[a * n_basis_ + b] += row[a] * row[b];
        }
    }
    for (std::size_t a = 0; a < n_basis_; ++a)
        for (std::size_t b = a + 1; b < n_basis_; ++b)
            gram[a * n_basis_ + b] = gram[b * n_basis_ + a];
    // Normalize so pivots are O(1); columns already have unit RMS.
    const double inv_n = 1.0 / static_cast<double>(n_particles_);
    for (double& v : gram) v *= inv_n;
    for (double& v : rhs) v *= inv_n;

    const auto coeff = cholesky_solve(std::move(gram), std::move(rhs), n_basis_);

    Fit out;
    out.fitted.resize(n_particles_);
    double res_sq = 0.0;
    for (std::size_t i = 0; i < n_particles_; ++i) {
        const double* row = design_.data() + i * n_basis_;
        double v = 0.0;
        for (std::size_t a = 0; a < n_basis_; ++a) v += row[a] * coeff[a];
        out.fitted[i] = v;
        const double r = targets[i] - v;
        res_sq += r * r;
    }
    out.residual_rms = std::sqrt(res_sq / static_cast<double>(n_particles_));
    return out;
}

}  // namespace dmr
