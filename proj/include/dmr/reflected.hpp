#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dmr/brownian.hpp"
#include "dmr/mfbsde.hpp"
#include "dmr/skorokhod.hpp"

namespace dmr {

// Distributional barrier pair. The loss maps may depend on the particle
// through its terminal Brownian state (the omega argument); the catalog
// defaults ignore it. Constants: bi-Lipschitz (c, C) in x, M a bound on the
// loss at zero, gap a lower bound on R - L.
struct LossFieldPair {
    std::function<double(double t, double x, double omega)> L;
    std::function<double(double t, double x, double omega)> R;
    double c = 1.0;
    double C = 1.0;
    double M = 1.0;
    double gap = 1.0;
};

struct Scenario {
    TimeGrid grid;
    std::size_t d = 1;
    std::size_t n_particles = 2;
    std::uint64_t seed = 0;
    GeneratorSpec generator;
    TerminalFunctional terminal;
    LossFieldPair losses;
    double picard_tol = 1e-6;
    std::size_t max_picard_iters = 50;
    int basis_degree = 4;
    double root_tol = 1e-10;
};

// Converged (Y, Z, K) with K deterministic and split into its nondecreasing
// parts. The generating ensemble is kept so audits need not resimulate.
struct ReflectedSolution {
    BackwardSolution backward;          // assembled Y, Z
    std::vector<double> K;              // per node
    std::vector<double> KR;
    std::vector<double> KL;
    std::vector<double> picard_history;          // Delta_m per iterate
    std::vector<double> iterate_second_moments;  // max_k mean_i Y^2 per iterate
    BrownianEnsemble ensemble;
};

struct PicardStepResult {
    BackwardSolution unconstrained;  // (y^m, z^m)
    SkorokhodSolution reversed;      // reversed-time Skorokhod solve
    BackwardSolution assembled;      // (Y^m, Z^m)
    std::vector<double> K;
    std::vector<double> KR;
    std::vector<double> KL;
};

// Driver with y and its law frozen at the previous iterate, per particle.
DriverFn freeze_generator(const GeneratorSpec& generator, const TimeGrid& grid,
                          const std::vector<double>& y_prev,
                          std::size_t n_particles);

// Reversed-time Skorokhod data for the representation of K: input is the
// mean of y read backwards, barriers are the particle-averaged losses at the
// recentred argument.
std::pair<InputPath, ConstraintPair> build_skorokhod_data(
    const BackwardSolution& y_sol, const LossFieldPair& losses,
    const BrownianEnsemble& ensemble);

PicardStepResult picard_step(const Scenario& scenario,
                             const BrownianEnsemble& ensemble,
                             const std::vector<double>& y_prev);

// Full Picard loop from the conditional-expectation initializer (or an
// explicit override, one value per node per particle). Throws
// PicardNotConverged when max_picard_iters is exhausted.
ReflectedSolution solve_reflected(
    const Scenario& scenario,
    const std::optional<std::vector<double>>& y0_override = std::nullopt);

struct AuditReport {
    std::vector<double> mean_L;           // per node, E[L(t_k, Y_k)]
    std::vector<double> mean_R;
    std::vector<double> dKR;
    std::vector<double> dKL;
    std::vector<double> stat_slack;       // 3 standard errors of mean L/R, per node
    double flat_off_residual_R = 0.0;     // sum_k |E R| dKR
    double flat_off_residual_L = 0.0;
    double max_constraint_violation = 0.0;  // beyond tol_total
    std::vector<double> dynamics_residual;  // per node, |mean_i residual|
    double second_moment_diagnostic = 0.0;    // max over iterates of second moments
    double tol_total = 0.0;
};

AuditReport audit_solution(const ReflectedSolution& solution,
                           const Scenario& scenario);

struct UniquenessReport {
    double distance = 0.0;  // sup-node mean-square gap between converged Y fields
};

UniquenessReport uniqueness_probe(const Scenario& scenario,
                                  const std::vector<double>& alternative_y0);

// Empirical terminal admissibility: E[L(T, xi)] <= slack and
// E[R(T, xi)] >= -slack with slack = 3 standard errors. Throws ConfigError.
void check_terminal_admissibility(const Scenario& scenario,
                                  const BrownianEnsemble& ensemble);

}  // namespace dmr
