#include "dmr/skorokhod.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmr/errors.hpp"
#include "dmr/root_finding.hpp"

namespace dmr {

SkorokhodSolution solve_skorokhod(const InputPath& input,
                                  const ConstraintPair& constraints,
                                  double root_tol) {
    if (!input.valid()) throw std::invalid_argument("solve_skorokhod: input path size mismatch");
    if (!(root_tol > 0.0)) throw std::invalid_argument("solve_skorokhod: root_tol must be positive");

    const std::size_t n_nodes = input.grid.n_nodes();
    SkorokhodSolution sol;
    sol.grid = input.grid;
    sol.x.resize(n_nodes);
    sol.K.resize(n_nodes);
    sol.Kr.resize(n_nodes);
    sol.Kl.resize(n_nodes);

    const double slope = std::max(constraints.c, 1e-12);
    double kr = 0.0;
    double kl = 0.0;
    double k_prev = 0.0;

    for (std::size_t k = 0; k < n_nodes; ++k) {
        const double t = input.grid.t(k);
        const double s = input.values[k];
        const double candidate = s + k_prev;

        const double lv = constraints.l(t, candidate);
        const double rv = constraints.r(t, candidate);
        if (lv > 0.0 && rv < 0.0)
            throw GapViolation("solve_skorokhod: both barriers fire at node " + std::to_string(k));

        if (lv > 0.0) {
            // Push down to the root of l; root lies in [candidate - lv/c, candidate].
            const double x_star = root_solve_monotone(
                [&](double x) { return constraints.l(t, x); },
                Bracket{candidate - lv / slope, candidate}, root_tol);
            const double delta = std::max(0.0, candidate - x_star);
            kl += delta;
            if (constraints.r(t, candidate - delta) < -root_tol)
                throw GapViolation("solve_skorokhod: r fires after l-push at node " + std::to_string(k));
        } else if (rv < 0.0) {
            const double x_star = root_solve_monotone(
                [&](double x) { return constraints.r(t, x); },
                Bracket{candidate, candidate - rv / slope}, root_tol);
            const double delta = std::max(0.0, x_star - candidate);
            kr += delta;
            if (constraints.l(t, candidate + delta) > root_tol)
                throw GapViolation("solve_skorokhod: l fires after r-push at node " + std::to_string(k));
        }

        sol.Kr[k] = kr;
        sol.Kl[k] = kl;
        sol.K[k] = kr - kl;
        sol.x[k] = s + sol.K[k];
        k_prev = sol.K[k];
    }

    // Largest barrier value seen at an increment node; the flat-off condition
    // in discrete form asks this to stay below root_tol.
    double residual = 0.0;
    for (std::size_t k = 0; k < n_nodes; ++k) {
        const double dkr = sol.Kr[k] - (k == 0 ? 0.0 : sol.Kr[k - 1]);
        const double dkl = sol.Kl[k] - (k == 0 ? 0.0 : sol.Kl[k - 1]);
        const double t = input.grid.t(k);
        if (dkr > 0.0) residual = std::max(residual, std::abs(constraints.r(t, sol.x[k])));
        if (dkl > 0.0) residual = std::max(residual, std::abs(constraints.l(t, sol.x[k])));
    }
    sol.flat_off_residual = residual;
    return sol;
}

PhiPsi compute_phi_psi(const InputPath& input, const ConstraintPair& constraints,
                       double tol) {
    if (!input.valid()) throw std::invalid_argument("compute_phi_psi: input path size mismatch");

    const std::size_t n_nodes = input.grid.n_nodes();
    PhiPsi out;
    out.phi.resize(n_nodes);
    out.psi.resize(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k) {
        const double t = input.grid.t(k);
        const double s = input.values[k];
        out.phi[k] = root_solve_monotone(
            [&](double x) { return constraints.l(t, s + x); }, Bracket{-1.0, 1.0}, tol);
        out.psi[k] = root_solve_monotone(
            [&](double x) { return constraints.r(t, s + x); }, Bracket{-1.0, 1.0}, tol);
    }
    return out;
}

namespace {

double oscillation(const std::vector<double>& v, std::size_t k_lo, std::size_t k_hi) {
    double lo = v[k_lo];
    double hi = v[k_lo];
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        lo = std::min(lo, v[k]);
        hi = std::max(hi, v[k]);
    }
    return hi - lo;
}

}  // namespace

BoundReport check_oscillation_bound(const SkorokhodSolution& solution,
                                    const PhiPsi& roots,
                                    std::size_t k_lo, std::size_t k_hi,
                                    double root_tol) {
    if (k_hi >= solution.K.size() || k_lo > k_hi)
        throw std::invalid_argument("check_oscillation_bound: bad node range");

    BoundReport report;
    report.lhs = oscillation(solution.K, k_lo, k_hi);
    report.rhs = oscillation(roots.phi, k_lo, k_hi) + oscillation(roots.psi, k_lo, k_hi);
    report.holds = report.lhs <= report.rhs + 10.0 * root_tol;
    return report;
}

BoundReport check_continuity_bound(const SkorokhodSolution& sol1,
                                   const SkorokhodSolution& sol2,
                                   const InputPath& in1, const InputPath& in2,
                                   const ConstraintPair& cp1,
                                   const ConstraintPair& cp2,
                                   const SamplingBox& box, double root_tol) {
    if (sol1.K.size() != sol2.K.size() || in1.values.size() != in2.values.size())
        throw std::invalid_argument("check_continuity_bound: grids differ");

    BoundReport report;
    double sup_k = 0.0;
    double sup_s = 0.0;
    for (std::size_t k = 0; k < sol1.K.size(); ++k) {
        sup_k = std::max(sup_k, std::abs(sol1.K[k] - sol2.K[k]));
        sup_s = std::max(sup_s, std::abs(in1.values[k] - in2.values[k]));
    }

    // The exact sup over all of R is not computable; estimate over the
    // declared box at the grid times.
    double l_bar = 0.0;
    double r_bar = 0.0;
    const std::size_t n_x = std::max<std::size_t>(box.n_x, 2);
    for (std::size_t k = 0; k < sol1.K.size(); ++k) {
        const double t = sol1.grid.t(k);
        for (std::size_t j = 0; j < n_x; ++j) {
            const double x = box.x_lo + (box.x_hi - box.x_lo) *
                                            static_cast<double>(j) /
                                            static_cast<double>(n_x - 1);
            l_bar = std::max(l_bar, std::abs(cp1.l(t, x) - cp2.l(t, x)));
            r_bar = std::max(r_bar, std::abs(cp1.r(t, x) - cp2.r(t, x)));
        }
    }

    const double c = std::min(cp1.c, cp2.c);
    const double C = std::max(cp1.C, cp2.C);
    report.lhs = sup_k;
    report.rhs = (C / c) * sup_s + (1.0 / c) * std::max(l_bar, r_bar);
    report.holds = report.lhs <= report.rhs + 10.0 * root_tol;
    return report;
}

}  // namespace dmr
