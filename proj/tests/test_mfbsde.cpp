#include <doctest.h>

#include <cmath>
#include <vector>

#include "dmr/errors.hpp"
#include "dmr/mfbsde.hpp"
#include "dmr/regression.hpp"

using namespace dmr;

namespace {

TerminalFunctional terminal_bt() {
    return {"terminal_state", [](std::span<const double> b) { return b[0]; }};
}

GeneratorSpec zero_generator() {
    GeneratorSpec g;
    g.name = "zero";
    g.evaluator = [](double, double, const EmpiricalMeasure&,
                     std::span<const double>, const EmpiricalMeasure&) {
        return 0.0;
    };
    g.lambda = 0.0;
    return g;
}

}  // namespace

TEST_CASE("brownian ensemble invariants") {
    const TimeGrid grid(1.0, 20);
    const auto ens = simulate_brownian(grid, 2, 500, 42);
    CHECK(ens.paths.size() == 21 * 500 * 2);
    CHECK(ens.increments.size() == 20 * 500 * 2);

    SUBCASE("paths start at the origin and cumulate the increments") {
        for (std::size_t i = 0; i < 500; ++i) {
            CHECK(ens.at(0, i)[0] == 0.0);
            CHECK(ens.at(0, i)[1] == 0.0);
        }
        for (std::size_t k = 0; k < 20; ++k)
            for (std::size_t i = 0; i < 500; ++i)
                for (std::size_t j = 0; j < 2; ++j)
                    CHECK(ens.at(k + 1, i)[j] ==
                          doctest::Approx(ens.at(k, i)[j] + ens.increment(k, i)[j])
                              .epsilon(1e-15));
    }

    SUBCASE("terminal variance near the horizon") {
        double var = 0.0;
        for (std::size_t i = 0; i < 500; ++i) {
            const double b = ens.at(20, i)[0];
            var += b * b;
        }
        var /= 500.0;
        CHECK(var == doctest::Approx(1.0).epsilon(0.2));
    }

    SUBCASE("seed determinism") {
        const auto again = simulate_brownian(grid, 2, 500, 42);
        CHECK(again.paths == ens.paths);
        const auto other = simulate_brownian(grid, 2, 500, 43);
        CHECK(other.paths != ens.paths);
    }
}

TEST_CASE("polynomial regression recovers polynomial targets exactly") {
    const TimeGrid grid(1.0, 4);
    const auto ens = simulate_brownian(grid, 1, 400, 9);
    PolynomialRegression reg(ens, 2, 3);

    std::vector<double> targets(400);
    for (std::size_t i = 0; i < 400; ++i) {
        const double b = ens.at(2, i)[0];
        targets[i] = 2.0 - b + 0.5 * b * b * b;
    }
    const auto fit = reg.fit(targets);
    CHECK(fit.residual_rms <= 1e-10);
    for (std::size_t i = 0; i < 400; ++i)
        CHECK(fit.fitted[i] == doctest::Approx(targets[i]).epsilon(1e-8));
}

TEST_CASE("regression at the initial node is a sample average") {
    const TimeGrid grid(1.0, 4);
    const auto ens = simulate_brownian(grid, 1, 100, 9);
    PolynomialRegression reg(ens, 0, 4);
    CHECK(reg.basis_size() == 1);

    std::vector<double> targets(100);
    double avg = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
        targets[i] = static_cast<double>(i);
        avg += targets[i];
    }
    avg /= 100.0;
    const auto fit = reg.fit(targets);
    for (double v : fit.fitted) CHECK(v == doctest::Approx(avg).epsilon(1e-12));
}

TEST_CASE("degenerate design matrix raises RegressionSingular") {
    BrownianEnsemble ens;
    ens.grid = TimeGrid(1.0, 2);
    ens.d = 1;
    ens.n_particles = 50;
    ens.seed = 0;
    ens.paths.assign(3 * 50, 1.0);  // every particle sits at the same point
    ens.increments.assign(2 * 50, 0.0);
    // Constant state: every monomial column is identical, so the normal
    // equations are rank-deficient at fit time.
    PolynomialRegression reg(ens, 1, 2);
    const std::vector<double> targets(50, 1.0);
    CHECK_THROWS_AS(reg.fit(targets), RegressionSingular);
}

TEST_CASE("martingale case: zero driver with terminal Brownian state") {
    const TimeGrid grid(1.0, 50);
    const auto ens = simulate_brownian(grid, 1, 4000, 101);
    const auto sol = solve_mfbsde(ens, zero_generator(), terminal_bt(), 4);

    SUBCASE("terminal node is the terminal payoff bitwise") {
        for (std::size_t i = 0; i < 4000; ++i)
            CHECK(sol.y(50, i) == ens.at(50, i)[0]);
    }

    SUBCASE("Y tracks the Brownian state and Z stays near one") {
        // Max-over-time mean-abs error, the natural Monte Carlo error measure.
        double y_err = 0.0, z_err = 0.0;
        for (std::size_t k = 0; k < 50; ++k) {
            double ya = 0.0, za = 0.0;
            for (std::size_t i = 0; i < 4000; ++i) {
                ya += std::abs(sol.y(k, i) - ens.at(k, i)[0]);
                za += std::abs(sol.z(k, i)[0] - 1.0);
            }
            y_err = std::max(y_err, ya / 4000.0);
            z_err = std::max(z_err, za / 4000.0);
        }
        CHECK(y_err <= 0.05);
        CHECK(z_err <= 0.1);
    }
}

TEST_CASE("constant driver shifts the value by the remaining time") {
    const TimeGrid grid(1.0, 40);
    const auto ens = simulate_brownian(grid, 1, 3000, 55);
    GeneratorSpec g = zero_generator();
    g.name = "constant";
    g.evaluator = [](double, double, const EmpiricalMeasure&,
                     std::span<const double>, const EmpiricalMeasure&) {
        return 2.0;
    };
    const auto sol = solve_mfbsde(ens, g, terminal_bt(), 4);
    for (std::size_t k = 0; k <= 40; ++k) {
        const double expect = 2.0 * (1.0 - grid.t(k));
        double err = 0.0;
        for (std::size_t i = 0; i < 3000; ++i)
            err += std::abs(sol.y(k, i) - ens.at(k, i)[0] - expect);
        CHECK(err / 3000.0 <= 0.05);
    }
}

TEST_CASE("mean-field driver follows the exponential mean flow") {
    const TimeGrid grid(1.0, 50);
    const auto ens = simulate_brownian(grid, 1, 4000, 77);
    GeneratorSpec g;
    g.name = "mean";
    g.lambda = 1.0;
    g.evaluator = [](double, double, const EmpiricalMeasure& mu,
                     std::span<const double>, const EmpiricalMeasure&) {
        return mean(mu)[0];
    };
    TerminalFunctional xi{"shifted_state",
                          [](std::span<const double> b) { return b[0] + 1.0; }};
    const auto sol = solve_mfbsde(ens, g, xi, 4);
    for (std::size_t k = 0; k <= 50; ++k) {
        double m = 0.0;
        for (std::size_t i = 0; i < 4000; ++i) m += sol.y(k, i);
        m /= 4000.0;
        CHECK(std::abs(m - std::exp(1.0 - grid.t(k))) <= 0.05);
    }
}

TEST_CASE("regression residuals shrink toward the terminal time") {
    const TimeGrid grid(1.0, 50);
    const auto ens = simulate_brownian(grid, 1, 2000, 13);
    const auto sol = solve_mfbsde(ens, zero_generator(), terminal_bt(), 4);
    REQUIRE(sol.regression_residuals.size() == 50);
    // One-step conditional variance of B_T given B_k decreases in k; compare
    // the first and last thirds in aggregate rather than nodewise.
    double early = 0.0, late = 0.0;
    for (std::size_t k = 0; k < 16; ++k) early += sol.regression_residuals[k];
    for (std::size_t k = 34; k < 50; ++k) late += sol.regression_residuals[k];
    CHECK(early <= late);
}

TEST_CASE("stability gap ingredients") {
    const TimeGrid grid(1.0, 30);
    const auto ens = simulate_brownian(grid, 1, 2000, 31);
    const auto g = zero_generator();
    const auto t1 = terminal_bt();

    SUBCASE("identical problems give a zero gap") {
        const auto s1 = solve_mfbsde(ens, g, t1, 4);
        const auto rep = stability_gap(s1, s1, g, g, t1, t1, ens);
        CHECK(rep.sup_y_gap_sq == 0.0);
        CHECK(rep.z_gap_sq == 0.0);
        CHECK(rep.terminal_gap_sq == 0.0);
        CHECK(rep.driver_gap_sq == 0.0);
    }

    SUBCASE("terminal shift shows up in every ingredient") {
        TerminalFunctional t2{"shifted",
                              [](std::span<const double> b) { return b[0] + 0.5; }};
        const auto s1 = solve_mfbsde(ens, g, t1, 4);
        const auto s2 = solve_mfbsde(ens, g, t2, 4);
        const auto rep = stability_gap(s1, s2, g, g, t1, t2, ens);
        CHECK(rep.terminal_gap_sq == doctest::Approx(0.25).epsilon(1e-9));
        CHECK(rep.sup_y_gap_sq == doctest::Approx(0.25).epsilon(1e-6));
        CHECK(rep.driver_gap_sq == 0.0);
        CHECK(rep.ratio > 0.0);
    }
}

TEST_CASE("mao modulus validation") {
    std::vector<double> pts;
    for (int i = 0; i <= 200; ++i) pts.push_back(i * 0.01);

    GeneratorSpec ok;
    ok.regularity = Regularity::mao;
    ok.beta = 1.5;
    ok.rho = [](double r) { return std::sqrt(r); };
    CHECK(validate_mao_modulus(ok, pts));

    GeneratorSpec convex = ok;
    convex.rho = [](double r) { return r * r; };
    CHECK_FALSE(validate_mao_modulus(convex, pts));

    GeneratorSpec offset = ok;
    offset.rho = [](double r) { return r + 0.1; };  // rho(0) != 0
    CHECK_FALSE(validate_mao_modulus(offset, pts));

    GeneratorSpec unbounded = ok;
    unbounded.beta = 0.1;
    unbounded.rho = [](double r) { return r; };  // exceeds beta (1 + r)
    CHECK_FALSE(validate_mao_modulus(unbounded, pts));
}
