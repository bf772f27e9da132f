#include <doctest.h>

#include <cmath>
#include <random>

#include "dmr/errors.hpp"
#include "dmr/measure.hpp"

using namespace dmr;

TEST_CASE("from_scalars and mean") {
    const auto mu = EmpiricalMeasure::from_scalars({1.0, 2.0, 3.0, 6.0});
    CHECK(mu.n == 4);
    CHECK(mu.d == 1);
    CHECK(mu.valid());
    CHECK(mean(mu) == std::vector<double>{3.0});
}

TEST_CASE("mean in two dimensions") {
    EmpiricalMeasure mu;
    mu.n = 2;
    mu.d = 2;
    mu.data = {1.0, 0.0, 3.0, 4.0};
    const auto m = mean(mu);
    CHECK(m[0] == 2.0);
    CHECK(m[1] == 2.0);
}

TEST_CASE("wasserstein1 on sorted scalar samples") {
    const auto mu = EmpiricalMeasure::from_scalars({0.0, 1.0});
    const auto nu = EmpiricalMeasure::from_scalars({2.0, 5.0});
    // Sorted pairing: |0-2| + |1-5| averaged.
    CHECK(wasserstein1_1d(mu, nu) == doctest::Approx(3.0));
}

TEST_CASE("wasserstein1 ignores sample order") {
    const auto mu = EmpiricalMeasure::from_scalars({3.0, -1.0, 0.5});
    const auto nu = EmpiricalMeasure::from_scalars({0.5, 3.0, -1.0});
    CHECK(wasserstein1_1d(mu, nu) == 0.0);
}

TEST_CASE("wasserstein1 translation equivariance") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> a(200), b(200);
    for (auto& v : a) v = g(rng);
    for (auto& v : b) v = 0.5 * g(rng) + 0.2;
    const auto mu = EmpiricalMeasure::from_scalars(a);
    const auto nu = EmpiricalMeasure::from_scalars(b);
    const double base = wasserstein1_1d(mu, nu);

    auto shifted = a;
    for (auto& v : shifted) v += 1.75;
    const double d_shift =
        wasserstein1_1d(EmpiricalMeasure::from_scalars(shifted), mu);
    CHECK(d_shift == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(base >= 0.0);
}

TEST_CASE("wasserstein1 satisfies the triangle inequality on random triples") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(64), b(64), c(64);
        for (auto& v : a) v = g(rng);
        for (auto& v : b) v = 2.0 * g(rng) - 1.0;
        for (auto& v : c) v = 0.3 * g(rng) + 0.7;
        const auto mu = EmpiricalMeasure::from_scalars(a);
        const auto nu = EmpiricalMeasure::from_scalars(b);
        const auto pi = EmpiricalMeasure::from_scalars(c);
        CHECK(wasserstein1_1d(mu, nu) <=
              wasserstein1_1d(mu, pi) + wasserstein1_1d(pi, nu) + 1e-12);
        CHECK(wasserstein1_1d(mu, nu) == doctest::Approx(wasserstein1_1d(nu, mu)));
    }
}

TEST_CASE("wasserstein1 rejects mismatched shapes") {
    const auto mu = EmpiricalMeasure::from_scalars({0.0, 1.0});
    const auto nu = EmpiricalMeasure::from_scalars({0.0, 1.0, 2.0});
    CHECK_THROWS_AS(wasserstein1_1d(mu, nu), DimensionMismatch);

    EmpiricalMeasure planar;
    planar.n = 2;
    planar.d = 2;
    planar.data = {0.0, 0.0, 1.0, 1.0};
    CHECK_THROWS_AS(wasserstein1_1d(planar, planar), DimensionMismatch);
}

TEST_CASE("distance to the Dirac at zero") {
    const auto mu = EmpiricalMeasure::from_scalars({-2.0, 2.0});
    CHECK(d1_to_dirac0(mu) == doctest::Approx(2.0));

    EmpiricalMeasure planar;
    planar.n = 2;
    planar.d = 2;
    planar.data = {3.0, 4.0, 0.0, 0.0};
    CHECK(d1_to_dirac0(planar) == doctest::Approx(2.5));
}

TEST_CASE("dirac distance agrees with wasserstein1 against a zero sample") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> a(128);
    for (auto& v : a) v = g(rng);
    const auto mu = EmpiricalMeasure::from_scalars(a);
    const auto zero = EmpiricalMeasure::from_scalars(std::vector<double>(128, 0.0));
    CHECK(d1_to_dirac0(mu) == doctest::Approx(wasserstein1_1d(mu, zero)).epsilon(1e-12));
}
