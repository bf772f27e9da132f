#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "dmr/time_grid.hpp"

namespace dmr {

// Continuous input path sampled on the grid nodes.
struct InputPath {
    TimeGrid grid;
    std::vector<double> values;  // one per node

    bool valid() const { return values.size() == grid.n_nodes(); }
};

// Nonlinear barrier pair (l, r), strictly increasing and bi-Lipschitz in x
// with constants 0 < c <= C, and r - l >= gap > 0 everywhere.
struct ConstraintPair {
    std::function<double(double t, double x)> l;
    std::function<double(double t, double x)> r;
    double c = 1.0;
    double C = 1.0;
    double gap = 1.0;
};

// Discrete Skorokhod solution: x = s + K nodewise, K = Kr - Kl with Kr, Kl
// nondecreasing (an initial jump at node 0 is allowed).
struct SkorokhodSolution {
    TimeGrid grid;
    std::vector<double> x;
    std::vector<double> K;
    std::vector<double> Kr;
    std::vector<double> Kl;
    double flat_off_residual = 0.0;
};

struct BoundReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

// Nodewise minimal-push construction. At each node the candidate
// x = s_k + K_{k-1} is pushed down to the root of l (or up to the root of r)
// when it violates a barrier. Throws GapViolation if both barriers fire at
// one node and RootBracketFailure from the root solves.
SkorokhodSolution solve_skorokhod(const InputPath& input,
                                  const ConstraintPair& constraints,
                                  double root_tol);

// Nodewise roots phi_k, psi_k of l(t_k, s_k + x) = 0 and r(t_k, s_k + x) = 0.
struct PhiPsi {
    std::vector<double> phi;
    std::vector<double> psi;
};
PhiPsi compute_phi_psi(const InputPath& input, const ConstraintPair& constraints,
                       double tol);

// Oscillation of K on [k_lo, k_hi] against the oscillations of phi and psi.
BoundReport check_oscillation_bound(const SkorokhodSolution& solution,
                                    const PhiPsi& roots,
                                    std::size_t k_lo, std::size_t k_hi,
                                    double root_tol);

// Sampling box for the sup-differences of two constraint pairs.
struct SamplingBox {
    double x_lo = -10.0;
    double x_hi = 10.0;
    std::size_t n_x = 64;
};

// sup |K1 - K2| against (C/c) sup |s1 - s2| + (1/c) max(Lbar, Rbar), with the
// constraint sup-differences estimated over the declared box.
BoundReport check_continuity_bound(const SkorokhodSolution& sol1,
                                   const SkorokhodSolution& sol2,
                                   const InputPath& in1, const InputPath& in2,
                                   const ConstraintPair& cp1,
                                   const ConstraintPair& cp2,
                                   const SamplingBox& box, double root_tol);

}  // namespace dmr
