#include "dmr/reflected.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "dmr/errors.hpp"
#include "dmr/regression.hpp"

namespace dmr {

namespace {

std::vector<double> terminal_values(const Scenario& scenario,
                                    const BrownianEnsemble& ensemble) {
    const std::size_t n = ensemble.grid.n_steps;
    std::vector<double> xi(ensemble.n_particles);
    for (std::size_t i = 0; i < ensemble.n_particles; ++i)
        xi[i] = scenario.terminal.evaluator(ensemble.at(n, i));
    return xi;
}

double sample_se(std::span<const double> values) {
    const double n = static_cast<double>(values.size());
    double m = 0.0;
    for (double v : values) m += v;
    m /= n;
    double var = 0.0;
    for (double v : values) var += (v - m) * (v - m);
    var /= std::max(1.0, n - 1.0);
    return std::sqrt(var / n);
}

}  // namespace

void check_terminal_admissibility(const Scenario& scenario,
                                  const BrownianEnsemble& ensemble) {
    const std::size_t n = ensemble.grid.n_steps;
    const double T = ensemble.grid.horizon;
    const std::size_t N = ensemble.n_particles;
    const auto xi = terminal_values(scenario, ensemble);

    std::vector<double> lvals(N), rvals(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double omega = ensemble.at(n, i)[0];
        lvals[i] = scenario.losses.L(T, xi[i], omega);
        rvals[i] = scenario.losses.R(T, xi[i], omega);
    }
    double mean_l = 0.0, mean_r = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        mean_l += lvals[i];
        mean_r += rvals[i];
    }
    mean_l /= static_cast<double>(N);
    mean_r /= static_cast<double>(N);
    const double slack_l = 3.0 * sample_se(lvals) + scenario.root_tol;
    const double slack_r = 3.0 * sample_se(rvals) + scenario.root_tol;
    if (mean_l > slack_l)
        throw ConfigError("scenario: terminal violates E[L(T,xi)] <= 0 (got " +
                          std::to_string(mean_l) + ")");
    if (mean_r < -slack_r)
        throw ConfigError("scenario: terminal violates E[R(T,xi)] >= 0 (got " +
                          std::to_string(mean_r) + ")");
}

DriverFn freeze_generator(const GeneratorSpec& generator, const TimeGrid& grid,
                          const std::vector<double>& y_prev,
                          std::size_t n_particles) {
    const std::size_t n_nodes = grid.n_nodes();
    if (y_prev.size() != n_nodes * n_particles)
        throw std::invalid_argument("freeze_generator: Y_prev not defined on the full grid");

    // Per-node empirical laws of the frozen iterate, built once.
    auto laws = std::make_shared<std::vector<EmpiricalMeasure>>();
    laws->reserve(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k) {
        laws->push_back(EmpiricalMeasure::from_scalars(
            {y_prev.begin() + static_cast<std::ptrdiff_t>(k * n_particles),
             y_prev.begin() + static_cast<std::ptrdiff_t>((k + 1) * n_particles)}));
    }
    auto frozen = std::make_shared<std::vector<double>>(y_prev);
    auto eval = generator.evaluator;

    return [grid, frozen, laws, eval, n_particles](
               std::size_t k, std::size_t i, double /*y_hat*/,
               const EmpiricalMeasure& /*mu*/, std::span<const double> z,
               const EmpiricalMeasure& nu) {
        return eval(grid.t(k), (*frozen)[k * n_particles + i], (*laws)[k], z, nu);
    };
}

std::pair<InputPath, ConstraintPair> build_skorokhod_data(
    const BackwardSolution& y_sol, const LossFieldPair& losses,
    const BrownianEnsemble& ensemble) {
    const std::size_t n = y_sol.grid.n_steps;
    const std::size_t N = y_sol.n_particles;
    const double T = y_sol.grid.horizon;

    struct Shared {
        std::vector<double> y;       // node-major particle values
        std::vector<double> means;   // per forward node
        std::vector<double> omegas;  // terminal Brownian state per particle
        TimeGrid grid;
        std::size_t n_particles;
    };
    auto shared = std::make_shared<Shared>();
    shared->y = y_sol.Y;
    shared->grid = y_sol.grid;
    shared->n_particles = N;
    shared->means.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        double m = 0.0;
        for (std::size_t i = 0; i < N; ++i) m += y_sol.y(k, i);
        shared->means[k] = m / static_cast<double>(N);
    }
    shared->omegas.resize(N);
    for (std::size_t i = 0; i < N; ++i) shared->omegas[i] = ensemble.at(n, i)[0];

    InputPath input;
    input.grid = y_sol.grid;
    input.values.resize(n + 1);
    for (std::size_t j = 0; j <= n; ++j) input.values[j] = shared->means[n - j];

    // tau is a reversed-grid time; snap it back to the forward node.
    auto forward_node = [shared, n](double tau) {
        const double pos = tau / shared->grid.dt();
        const auto j = static_cast<std::size_t>(std::llround(pos));
        return n - std::min(j, n);
    };

    auto averaged = [shared, forward_node, T](
                        const std::function<double(double, double, double)>& loss,
                        double tau, double x) {
        const std::size_t k = forward_node(tau);
        const double recentre = shared->means[k];
        const double t_fwd = T - tau;
        double acc = 0.0;
        for (std::size_t i = 0; i < shared->n_particles; ++i) {
            const double yv = shared->y[k * shared->n_particles + i];
            acc += loss(t_fwd, yv - recentre + x, shared->omegas[i]);
        }
        return acc / static_cast<double>(shared->n_particles);
    };

    ConstraintPair cp;
    cp.l = [averaged, L = losses.L](double tau, double x) { return averaged(L, tau, x); };
    cp.r = [averaged, R = losses.R](double tau, double x) { return averaged(R, tau, x); };
    // Particle averaging preserves the bi-Lipschitz constants and the gap.
    cp.c = losses.c;
    cp.C = losses.C;
    cp.gap = losses.gap;
    return {std::move(input), std::move(cp)};
}

PicardStepResult picard_step(const Scenario& scenario,
                             const BrownianEnsemble& ensemble,
                             const std::vector<double>& y_prev) {
    const std::size_t n = scenario.grid.n_steps;

    PicardStepResult out;
    const DriverFn driver = freeze_generator(scenario.generator, scenario.grid,
                                             y_prev, ensemble.n_particles);
    out.unconstrained =
        solve_backward(ensemble, driver, scenario.terminal, scenario.basis_degree);

    auto [input, constraints] =
        build_skorokhod_data(out.unconstrained, scenario.losses, ensemble);
    out.reversed = solve_skorokhod(input, constraints, scenario.root_tol);

    // Forward regulator from the reversed solve: K_k = Kbar_n - Kbar_{n-k},
    // reading Kbar at the terminal node through its left limit (Kbar_{0-} = 0)
    // so that Y_T = xi exactly. A reversed push-up at node j lands in KR at
    // forward node n - j + 1.
    out.K.resize(n + 1);
    out.KR.resize(n + 1);
    out.KL.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double kr0 = (k == n) ? 0.0 : out.reversed.Kr[n - k];
        const double kl0 = (k == n) ? 0.0 : out.reversed.Kl[n - k];
        out.KR[k] = out.reversed.Kr[n] - kr0;
        out.KL[k] = out.reversed.Kl[n] - kl0;
        out.K[k] = out.KR[k] - out.KL[k];
    }

    out.assembled = out.unconstrained;
    const double k_terminal = out.K[n];
    for (std::size_t k = 0; k <= n; ++k) {
        const double shift = k_terminal - out.K[k];
        for (std::size_t i = 0; i < ensemble.n_particles; ++i)
            out.assembled.y(k, i) = out.unconstrained.y(k, i) + shift;
    }
    return out;
}

ReflectedSolution solve_reflected(
    const Scenario& scenario,
    const std::optional<std::vector<double>>& y0_override) {
    BrownianEnsemble ensemble = simulate_brownian(scenario.grid, scenario.d,
                                                  scenario.n_particles, scenario.seed);
    check_terminal_admissibility(scenario, ensemble);

    const std::size_t n = scenario.grid.n_steps;
    const std::size_t N = scenario.n_particles;

    std::vector<double> y_prev;
    if (y0_override) {
        if (y0_override->size() != (n + 1) * N)
            throw std::invalid_argument("solve_reflected: Y0 override size mismatch");
        y_prev = *y0_override;
    } else {
        // Y^0 = E_t[xi], estimated with the same regression operator as the
        // backward solver.
        const auto xi = terminal_values(scenario, ensemble);
        y_prev.resize((n + 1) * N);
        for (std::size_t k = 0; k <= n; ++k) {
            const PolynomialRegression reg(ensemble, k, scenario.basis_degree);
            const auto fit = reg.fit(xi);
            std::copy(fit.fitted.begin(), fit.fitted.end(),
                      y_prev.begin() + static_cast<std::ptrdiff_t>(k * N));
        }
    }

    std::vector<double> history;
    std::vector<double> second_moments;
    for (std::size_t m = 1; m <= scenario.max_picard_iters; ++m) {
        PicardStepResult step = picard_step(scenario, ensemble, y_prev);

        double delta = 0.0;
        double moment = 0.0;
        for (std::size_t k = 0; k <= n; ++k) {
            double gap = 0.0;
            double sq = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                const double ym = step.assembled.y(k, i);
                const double dy = ym - y_prev[k * N + i];
                gap += dy * dy;
                sq += ym * ym;
            }
            delta = std::max(delta, gap / static_cast<double>(N));
            moment = std::max(moment, sq / static_cast<double>(N));
        }
        history.push_back(delta);
        second_moments.push_back(moment);
        y_prev = step.assembled.Y;

        if (delta <= scenario.picard_tol) {
            ReflectedSolution sol;
            sol.backward = std::move(step.assembled);
            sol.K = std::move(step.K);
            sol.KR = std::move(step.KR);
            sol.KL = std::move(step.KL);
            sol.picard_history = std::move(history);
            sol.iterate_second_moments = std::move(second_moments);
            sol.ensemble = std::move(ensemble);
            return sol;
        }
    }
    throw PicardNotConverged("solve_reflected: tolerance not met after " +
                                 std::to_string(scenario.max_picard_iters) +
                                 " iterations",
                             std::move(history));
}

AuditReport audit_solution(const ReflectedSolution& solution,
                           const Scenario& scenario) {
    const std::size_t n = solution.backward.grid.n_steps;
    const std::size_t N = solution.backward.n_particles;
    const BrownianEnsemble& ens = solution.ensemble;
    const double dt = solution.backward.grid.dt();

    AuditReport report;
    report.mean_L.resize(n + 1);
    report.mean_R.resize(n + 1);
    report.dKR.resize(n + 1);
    report.dKL.resize(n + 1);
    report.stat_slack.resize(n + 1);

    std::vector<double> lvals(N), rvals(N);
    const std::size_t terminal_node = ens.grid.n_steps;
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = solution.backward.grid.t(k);
        for (std::size_t i = 0; i < N; ++i) {
            const double omega = ens.at(terminal_node, i)[0];
            const double y = solution.backward.y(k, i);
            lvals[i] = scenario.losses.L(t, y, omega);
            rvals[i] = scenario.losses.R(t, y, omega);
        }
        double ml = 0.0, mr = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            ml += lvals[i];
            mr += rvals[i];
        }
        report.mean_L[k] = ml / static_cast<double>(N);
        report.mean_R[k] = mr / static_cast<double>(N);
        report.stat_slack[k] = 3.0 * std::max(sample_se(lvals), sample_se(rvals));
        report.dKR[k] = solution.KR[k] - (k == 0 ? 0.0 : solution.KR[k - 1]);
        report.dKL[k] = solution.KL[k] - (k == 0 ? 0.0 : solution.KL[k - 1]);
    }

    // The discrete regulator increment at node k binds the barrier at the
    // neighbouring reversed node (one forward step earlier), so the audit
    // tolerance carries a one-step modulus of the reversed input on top of
    // root_tol and the statistical slack.
    double grid_slack = 0.0;
    std::vector<double> mean_y(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        double m = 0.0;
        for (std::size_t i = 0; i < N; ++i) m += solution.backward.y(k, i);
        mean_y[k] = m / static_cast<double>(N) - (solution.K[n] - solution.K[k]);
    }
    for (std::size_t k = 1; k <= n; ++k)
        grid_slack = std::max(grid_slack, std::abs(mean_y[k] - mean_y[k - 1]));
    const double max_slack =
        *std::max_element(report.stat_slack.begin(), report.stat_slack.end());
    report.tol_total = scenario.root_tol + max_slack + scenario.losses.C * grid_slack;

    for (std::size_t k = 0; k <= n; ++k) {
        report.flat_off_residual_R += std::abs(report.mean_R[k]) * report.dKR[k];
        report.flat_off_residual_L += std::abs(report.mean_L[k]) * report.dKL[k];
        const double viol = std::max(report.mean_L[k] - report.tol_total,
                                     -report.mean_R[k] - report.tol_total);
        report.max_constraint_violation =
            std::max(report.max_constraint_violation, std::max(0.0, viol));
    }

    // Euler dynamics residual, particle-averaged per step.
    report.dynamics_residual.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        EmpiricalMeasure mu = EmpiricalMeasure::from_scalars(
            {solution.backward.y_at(k).begin(), solution.backward.y_at(k).end()});
        EmpiricalMeasure nu;
        nu.n = N;
        nu.d = solution.backward.d;
        nu.data.assign(
            solution.backward.Z.begin() + static_cast<std::ptrdiff_t>(k * N * nu.d),
            solution.backward.Z.begin() + static_cast<std::ptrdiff_t>((k + 1) * N * nu.d));
        const double t = solution.backward.grid.t(k);
        const double dK = solution.K[k + 1] - solution.K[k];
        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const auto z = solution.backward.z(k, i);
            const auto db = ens.increment(k, i);
            double zdb = 0.0;
            for (std::size_t c = 0; c < z.size(); ++c) zdb += z[c] * db[c];
            const double f = scenario.generator.evaluator(
                t, solution.backward.y(k, i), mu, z, nu);
            acc += solution.backward.y(k, i) - solution.backward.y(k + 1, i) -
                   f * dt + zdb - dK;
        }
        report.dynamics_residual[k] = std::abs(acc / static_cast<double>(N));
    }

    report.second_moment_diagnostic =
        solution.iterate_second_moments.empty()
            ? 0.0
            : *std::max_element(solution.iterate_second_moments.begin(),
                                solution.iterate_second_moments.end());
    return report;
}

UniquenessReport uniqueness_probe(const Scenario& scenario,
                                  const std::vector<double>& alternative_y0) {
    const ReflectedSolution a = solve_reflected(scenario);
    const ReflectedSolution b = solve_reflected(scenario, alternative_y0);

    const std::size_t n = scenario.grid.n_steps;
    const std::size_t N = scenario.n_particles;
    UniquenessReport report;
    for (std::size_t k = 0; k <= n; ++k) {
        double gap = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double dy = a.backward.y(k, i) - b.backward.y(k, i);
            gap += dy * dy;
        }
        report.distance = std::max(report.distance, gap / static_cast<double>(N));
    }
    return report;
}

}  // namespace dmr
