#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dmr/errors.hpp"
#include "dmr/skorokhod.hpp"
#include "oracles.hpp"

using namespace dmr;
using namespace dmr::testing;

namespace {

constexpr double kRootTol = 1e-10;

InputPath path_from(const TimeGrid& grid, const std::function<double(double)>& f) {
    InputPath input;
    input.grid = grid;
    input.values.resize(grid.n_nodes());
    for (std::size_t k = 0; k < input.values.size(); ++k)
        input.values[k] = f(grid.t(k));
    return input;
}

ConstraintPair unit_band() {
    ConstraintPair cp;
    cp.l = [](double, double x) { return x - 1.0; };
    cp.r = [](double, double x) { return x + 1.0; };
    cp.c = 1.0;
    cp.C = 1.0;
    cp.gap = 2.0;
    return cp;
}

}  // namespace

TEST_CASE("interior path never touches the barriers") {
    const TimeGrid grid(1.0, 100);
    const auto input = path_from(grid, [](double) { return 0.0; });
    const auto sol = solve_skorokhod(input, unit_band(), kRootTol);
    for (std::size_t k = 0; k < sol.x.size(); ++k) {
        CHECK(sol.K[k] == 0.0);
        CHECK(sol.x[k] == 0.0);
    }
    CHECK(sol.flat_off_residual == 0.0);
}

TEST_CASE("linear descent against the hand computation") {
    const TimeGrid grid(1.0, 200);
    const auto input = path_from(grid, [](double t) { return -2.0 * t; });
    const auto sol = solve_skorokhod(input, unit_band(), kRootTol);
    for (std::size_t k = 0; k < sol.x.size(); ++k) {
        const double t = grid.t(k);
        CHECK(sol.x[k] == doctest::Approx(std::max(-1.0, -2.0 * t)).epsilon(1e-9));
        CHECK(sol.Kr[k] == doctest::Approx(std::max(0.0, 2.0 * t - 1.0)).epsilon(1e-9));
        CHECK(sol.Kl[k] == 0.0);
    }
}

TEST_CASE("sine input matches the clipping recursion") {
    const TimeGrid grid(1.0, 500);
    const auto input =
        path_from(grid, [](double t) { return std::sin(4.0 * std::numbers::pi * t); });
    AffineBarriers barriers{[](double) { return 0.5; }, [](double) { return -0.5; }, 2.0};
    ConstraintPair cp = to_constraints(barriers);
    cp.gap = 2.0;

    const auto sol = solve_skorokhod(input, cp, kRootTol);
    const auto oracle = clipping_recursion(input, barriers);
    for (std::size_t k = 0; k < sol.x.size(); ++k) {
        CHECK(std::abs(sol.x[k] - oracle.x[k]) <= 10.0 * kRootTol);
        CHECK(std::abs(sol.K[k] - oracle.K[k]) <= 10.0 * kRootTol);
    }
}

TEST_CASE("assembly identities hold bitwise and flat-off at increments") {
    const TimeGrid grid(1.0, 300);
    std::mt19937_64 rng(7);
    const auto input = random_piecewise_linear(grid, rng);
    ConstraintPair cp;
    cp.l = [](double t, double x) { return 1.5 * (x - 0.4 - 0.2 * t); };
    cp.r = [](double t, double x) { return 1.5 * (x + 0.6 + 0.1 * t); };
    cp.c = 1.5;
    cp.C = 1.5;
    cp.gap = 1.5;

    const auto sol = solve_skorokhod(input, cp, kRootTol);
    for (std::size_t k = 0; k < sol.x.size(); ++k) {
        CHECK(sol.x[k] == input.values[k] + sol.K[k]);  // bitwise
        CHECK(sol.K[k] == sol.Kr[k] - sol.Kl[k]);
        CHECK(cp.l(grid.t(k), sol.x[k]) <= kRootTol);
        CHECK(cp.r(grid.t(k), sol.x[k]) >= -kRootTol);
        if (k > 0) {
            CHECK(sol.Kr[k] >= sol.Kr[k - 1]);
            CHECK(sol.Kl[k] >= sol.Kl[k - 1]);
        }
    }
    CHECK(sol.flat_off_residual <= kRootTol);
}

TEST_CASE("determinism") {
    const TimeGrid grid(1.0, 64);
    std::mt19937_64 rng(11);
    const auto input = random_piecewise_linear(grid, rng);
    const auto a = solve_skorokhod(input, unit_band(), kRootTol);
    const auto b = solve_skorokhod(input, unit_band(), kRootTol);
    CHECK(a.x == b.x);
    CHECK(a.K == b.K);
}

TEST_CASE("crossed barriers raise GapViolation") {
    const TimeGrid grid(1.0, 10);
    const auto input = path_from(grid, [](double) { return 0.0; });
    ConstraintPair cp;
    cp.l = [](double, double x) { return x + 1.0; };  // l > r: invalid pair
    cp.r = [](double, double x) { return x - 1.0; };
    cp.c = 1.0;
    cp.C = 1.0;
    cp.gap = -2.0;
    CHECK_THROWS_AS(solve_skorokhod(input, cp, kRootTol), GapViolation);
}

TEST_CASE("grid refinement shrinks the discretization error on smooth input") {
    AffineBarriers barriers{[](double) { return 0.3; }, [](double) { return -0.3; }, 1.0};
    ConstraintPair cp = to_constraints(barriers);
    cp.gap = 0.6;
    auto f = [](double t) { return std::sin(2.0 * std::numbers::pi * t); };

    double prev_err = 1e9;
    for (std::size_t n : {50, 100, 200, 400}) {
        const TimeGrid grid(1.0, n);
        const auto sol = solve_skorokhod(path_from(grid, f), cp, kRootTol);
        // Compare against a fine reference through the clipping recursion.
        const TimeGrid fine(1.0, 3200);
        const auto ref = clipping_recursion(path_from(fine, f), barriers);
        double err = 0.0;
        for (std::size_t k = 0; k <= n; ++k)
            err = std::max(err, std::abs(sol.x[k] - ref.x[k * (3200 / n)]));
        CHECK(err <= prev_err + 1e-12);
        prev_err = err;
    }
}

TEST_CASE("phi and psi solve the node equations") {
    const TimeGrid grid(1.0, 50);

    SUBCASE("affine inversion") {
        const auto input = path_from(grid, [](double) { return 0.0; });
        ConstraintPair cp = unit_band();  // roots at 1 and -1
        const auto roots = compute_phi_psi(input, cp, kRootTol);
        for (std::size_t k = 0; k <= 50; ++k) {
            CHECK(roots.phi[k] == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(roots.psi[k] == doctest::Approx(-1.0).epsilon(1e-9));
        }
    }

    SUBCASE("time-dependent barrier cancels the input") {
        const auto input = path_from(grid, [](double t) { return t; });
        ConstraintPair cp;
        cp.l = [](double t, double x) { return 2.0 * (x - t); };
        cp.r = [](double t, double x) { return 2.0 * (x - t + 3.0); };
        cp.c = 2.0;
        cp.C = 2.0;
        cp.gap = 6.0;
        const auto roots = compute_phi_psi(input, cp, kRootTol);
        for (std::size_t k = 0; k <= 50; ++k)
            CHECK(std::abs(roots.phi[k]) <= 1e-9);
    }

    SUBCASE("defining property holds post hoc") {
        std::mt19937_64 rng(3);
        const auto input = random_piecewise_linear(grid, rng);
        ConstraintPair cp;
        cp.l = [](double t, double x) { return x + 0.3 * std::atan(x) - 1.0 - t; };
        cp.r = [](double t, double x) { return x + 0.3 * std::atan(x) + 1.0 + t; };
        cp.c = 1.0;
        cp.C = 1.3;
        cp.gap = 2.0;
        const auto roots = compute_phi_psi(input, cp, kRootTol);
        for (std::size_t k = 0; k <= 50; ++k) {
            CHECK(std::abs(cp.l(grid.t(k), input.values[k] + roots.phi[k])) <= kRootTol);
            CHECK(std::abs(cp.r(grid.t(k), input.values[k] + roots.psi[k])) <= kRootTol);
        }
    }
}

TEST_CASE("oscillation bound") {
    const TimeGrid grid(1.0, 200);

    SUBCASE("inactive regulator") {
        const auto input = path_from(grid, [](double) { return 0.0; });
        const auto cp = unit_band();
        const auto sol = solve_skorokhod(input, cp, kRootTol);
        const auto roots = compute_phi_psi(input, cp, kRootTol);
        const auto report = check_oscillation_bound(sol, roots, 0, 200, kRootTol);
        CHECK(report.lhs == 0.0);
        CHECK(report.holds);
    }

    SUBCASE("linear descent reaches oscillation one") {
        const auto input = path_from(grid, [](double t) { return -2.0 * t; });
        const auto cp = unit_band();
        const auto sol = solve_skorokhod(input, cp, kRootTol);
        const auto roots = compute_phi_psi(input, cp, kRootTol);
        const auto report = check_oscillation_bound(sol, roots, 0, 200, kRootTol);
        CHECK(report.lhs == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(report.rhs >= 1.0 - 1e-8);
        CHECK(report.holds);
    }

    SUBCASE("randomized audit") {
        std::mt19937_64 rng(2024);
        for (int trial = 0; trial < 100; ++trial) {
            const auto input = random_piecewise_linear(grid, rng);
            std::uniform_real_distribution<double> width(0.2, 1.5);
            const double w = width(rng);
            AffineBarriers barriers{[w](double) { return w; },
                                    [w](double) { return -w; }, 1.0};
            ConstraintPair cp = to_constraints(barriers);
            cp.gap = 2.0 * w;
            const auto sol = solve_skorokhod(input, cp, kRootTol);
            const auto roots = compute_phi_psi(input, cp, kRootTol);
            const auto report = check_oscillation_bound(sol, roots, 0, 200, kRootTol);
            CHECK(report.holds);
        }
    }
}

TEST_CASE("continuity bound") {
    const TimeGrid grid(1.0, 200);
    const SamplingBox box{-5.0, 5.0, 64};

    SUBCASE("identical inputs give zero gap") {
        const auto input = path_from(grid, [](double t) { return -2.0 * t; });
        const auto cp = unit_band();
        const auto sol = solve_skorokhod(input, cp, kRootTol);
        const auto report =
            check_continuity_bound(sol, sol, input, input, cp, cp, box, kRootTol);
        CHECK(report.lhs == 0.0);
        CHECK(report.holds);
    }

    SUBCASE("constant input shift") {
        const auto cp = unit_band();
        const auto in1 = path_from(grid, [](double t) { return -2.0 * t; });
        auto in2 = in1;
        for (double& v : in2.values) v += 0.1;
        const auto s1 = solve_skorokhod(in1, cp, kRootTol);
        const auto s2 = solve_skorokhod(in2, cp, kRootTol);
        const auto report =
            check_continuity_bound(s1, s2, in1, in2, cp, cp, box, kRootTol);
        CHECK(report.lhs <= (cp.C / cp.c) * 0.1 + 10.0 * kRootTol);
        CHECK(report.holds);
    }

    SUBCASE("randomized perturbation pairs") {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> eps(-0.3, 0.3);
        for (int trial = 0; trial < 100; ++trial) {
            const auto in1 = random_piecewise_linear(grid, rng);
            auto in2 = in1;
            const double shift = eps(rng);
            for (double& v : in2.values) v += shift;

            const double w1 = 0.8;
            const double w2 = w1 + eps(rng) * 0.1;
            AffineBarriers b1{[w1](double) { return w1; }, [w1](double) { return -w1; }, 1.0};
            AffineBarriers b2{[w2](double) { return w2; }, [w2](double) { return -w2; }, 1.0};
            ConstraintPair cp1 = to_constraints(b1);
            cp1.gap = 2.0 * w1;
            ConstraintPair cp2 = to_constraints(b2);
            cp2.gap = 2.0 * w2;

            const auto s1 = solve_skorokhod(in1, cp1, kRootTol);
            const auto s2 = solve_skorokhod(in2, cp2, kRootTol);
            const auto report =
                check_continuity_bound(s1, s2, in1, in2, cp1, cp2, box, kRootTol);
            CHECK(report.holds);
        }
    }
}
