#include "dmr/mfbsde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmr/errors.hpp"
#include "dmr/regression.hpp"

namespace dmr {

BackwardSolution solve_backward(const BrownianEnsemble& ensemble,
                                const DriverFn& driver,
                                const TerminalFunctional& terminal,
                                int basis_degree) {
    const std::size_t n = ensemble.grid.n_steps;
    const std::size_t N = ensemble.n_particles;
    const std::size_t d = ensemble.d;
    const double dt = ensemble.grid.dt();

    BackwardSolution sol;
    sol.grid = ensemble.grid;
    sol.d = d;
    sol.n_particles = N;
    sol.basis_degree = basis_degree;
    sol.Y.assign((n + 1) * N, 0.0);
    sol.Z.assign((n + 1) * N * d, 0.0);
    sol.regression_residuals.assign(n, 0.0);

    for (std::size_t i = 0; i < N; ++i) sol.y(n, i) = terminal.evaluator(ensemble.at(n, i));

    std::vector<double> z_target(N);
    for (std::size_t kk = n; kk-- > 0;) {
        const std::size_t k = kk;
        const PolynomialRegression reg(ensemble, k, basis_degree);

        const auto fit_y = reg.fit(sol.y_at(k + 1));
        sol.regression_residuals[k] = fit_y.residual_rms;

        // Z_k = E_k[Y_{k+1} dB_k] / dt. The fitted conditional mean is
        // subtracted from the target first; it is orthogonal to dB_k and
        // removes most of the Monte Carlo variance.
        for (std::size_t c = 0; c < d; ++c) {
            for (std::size_t i = 0; i < N; ++i) {
                z_target[i] = (sol.y(k + 1, i) - fit_y.fitted[i]) *
                              ensemble.increment(k, i)[c] / dt;
            }
            const auto fit_z = reg.fit(z_target);
            for (std::size_t i = 0; i < N; ++i) sol.z(k, i)[c] = fit_z.fitted[i];
        }

        EmpiricalMeasure mu = EmpiricalMeasure::from_scalars(fit_y.fitted);
        EmpiricalMeasure nu;
        nu.n = N;
        nu.d = d;
        nu.data.assign(sol.Z.begin() + static_cast<std::ptrdiff_t>(k * N * d),
                       sol.Z.begin() + static_cast<std::ptrdiff_t>((k + 1) * N * d));

        const double t = ensemble.grid.t(k);
        (void)t;
        for (std::size_t i = 0; i < N; ++i) {
            const double y_hat = fit_y.fitted[i];
            const double f = driver(k, i, y_hat, mu, sol.z(k, i), nu);
            const double y = y_hat + f * dt;
            if (!std::isfinite(y))
                throw NonFiniteValue("solve_backward: Y blew up at step " + std::to_string(k));
            sol.y(k, i) = y;
        }
    }

    // No increment is available at the terminal node; carry Z forward.
    if (n > 0)
        std::copy(sol.Z.begin() + static_cast<std::ptrdiff_t>((n - 1) * N * d),
                  sol.Z.begin() + static_cast<std::ptrdiff_t>(n * N * d),
                  sol.Z.begin() + static_cast<std::ptrdiff_t>(n * N * d));

    for (double v : sol.Z)
        if (!std::isfinite(v)) throw NonFiniteValue("solve_backward: non-finite Z");
    return sol;
}

BackwardSolution solve_mfbsde(const BrownianEnsemble& ensemble,
                              const GeneratorSpec& generator,
                              const TerminalFunctional& terminal,
                              int basis_degree) {
    const double dt = ensemble.grid.dt();
    (void)dt;
    DriverFn driver = [&](std::size_t k, std::size_t, double y_hat,
                          const EmpiricalMeasure& mu, std::span<const double> z,
                          const EmpiricalMeasure& nu) {
        return generator.evaluator(ensemble.grid.t(k), y_hat, mu, z, nu);
    };
    return solve_backward(ensemble, driver, terminal, basis_degree);
}

GapReport stability_gap(const BackwardSolution& sol1, const BackwardSolution& sol2,
                        const GeneratorSpec& gen1, const GeneratorSpec& gen2,
                        const TerminalFunctional& term1,
                        const TerminalFunctional& term2,
                        const BrownianEnsemble& ensemble) {
    if (!sol1.same_shape(sol2) || sol1.grid != ensemble.grid ||
        sol1.n_particles != ensemble.n_particles || sol1.d != ensemble.d)
        throw EnsembleMismatch("stability_gap: solutions not on the same ensemble");

    const std::size_t n = sol1.grid.n_steps;
    const std::size_t N = sol1.n_particles;
    const std::size_t d = sol1.d;
    const double dt = sol1.grid.dt();

    GapReport report;
    for (std::size_t k = 0; k <= n; ++k) {
        double y_gap = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double dy = sol1.y(k, i) - sol2.y(k, i);
            y_gap += dy * dy;
        }
        report.sup_y_gap_sq = std::max(report.sup_y_gap_sq, y_gap / static_cast<double>(N));
        if (k < n) {
            double z_gap = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const auto z1 = sol1.z(k, i);
                const auto z2 = sol2.z(k, i);
                for (std::size_t c = 0; c < d; ++c) {
                    const double dz = z1[c] - z2[c];
                    z_gap += dz * dz;
                }
            }
            report.z_gap_sq += z_gap / static_cast<double>(N) * dt;
        }
    }

    for (std::size_t i = 0; i < N; ++i) {
        const double dxi = term1.evaluator(ensemble.at(n, i)) -
                           term2.evaluator(ensemble.at(n, i));
        report.terminal_gap_sq += dxi * dxi;
    }
    report.terminal_gap_sq /= static_cast<double>(N);

    // Driver difference evaluated along solution 1.
    for (std::size_t k = 0; k < n; ++k) {
        EmpiricalMeasure mu = EmpiricalMeasure::from_scalars(
            {sol1.y_at(k).begin(), sol1.y_at(k).end()});
        EmpiricalMeasure nu;
        nu.n = N;
        nu.d = d;
        nu.data.assign(sol1.Z.begin() + static_cast<std::ptrdiff_t>(k * N * d),
                       sol1.Z.begin() + static_cast<std::ptrdiff_t>((k + 1) * N * d));
        const double t = sol1.grid.t(k);
        double df_sq = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double df = gen1.evaluator(t, sol1.y(k, i), mu, sol1.z(k, i), nu) -
                              gen2.evaluator(t, sol1.y(k, i), mu, sol1.z(k, i), nu);
            df_sq += df * df;
        }
        report.driver_gap_sq += df_sq / static_cast<double>(N) * dt;
    }

    const double lhs = report.sup_y_gap_sq + report.z_gap_sq;
    const double rhs = report.terminal_gap_sq + report.driver_gap_sq;
    report.ratio = (rhs > 0.0) ? lhs / rhs : 0.0;
    return report;
}

bool validate_mao_modulus(const GeneratorSpec& generator,
                          std::span<const double> sample_points) {
    if (generator.regularity != Regularity::mao || !generator.rho) return false;
    const auto& rho = generator.rho;
    if (std::abs(rho(0.0)) > 1e-12) return false;

    std::vector<double> pts(sample_points.begin(), sample_points.end());
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double r = pts[i];
        if (r < 0.0) return false;
        const double v = rho(r);
        if (v < 0.0) return false;
        if (v > generator.beta * (1.0 + r) + 1e-12) return false;
        if (i > 0 && v + 1e-12 < rho(pts[i - 1])) return false;  // nondecreasing
        if (i > 0) {
            const double mid = 0.5 * (pts[i - 1] + r);
            if (rho(mid) + 1e-12 < 0.5 * (rho(pts[i - 1]) + v)) return false;  // concave
        }
    }
    return true;
}

}  // namespace dmr
