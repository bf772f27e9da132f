#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dmr {

// Uniformly weighted empirical measure: N samples in R^d, row-major.
struct EmpiricalMeasure {
    std::size_t n = 0;
    std::size_t d = 1;
    std::vector<double> data;  // n * d entries

    static EmpiricalMeasure from_scalars(std::vector<double> samples);

    std::span<const double> sample(std::size_t i) const {
        return {data.data() + i * d, d};
    }
    bool valid() const;
};

std::vector<double> mean(const EmpiricalMeasure& mu);

// 1-D Wasserstein-1 between equal-size samples: L1 distance of the sorted
// samples (the optimal coupling in one dimension).
double wasserstein1_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// Wasserstein-1 distance to the Dirac at the origin: mean Euclidean norm.
// Exact in any dimension since the coupling is forced.
double d1_to_dirac0(const EmpiricalMeasure& mu);

}  // namespace dmr
