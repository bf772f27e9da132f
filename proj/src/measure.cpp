#include "dmr/measure.hpp"

#include <algorithm>
#include <cmath>

#include "dmr/errors.hpp"

namespace dmr {

EmpiricalMeasure EmpiricalMeasure::from_scalars(std::vector<double> samples) {
    EmpiricalMeasure mu;
    mu.n = samples.size();
    mu.d = 1;
    mu.data = std::move(samples);
    return mu;
}

bool EmpiricalMeasure::valid() const {
    if (n < 1 || d < 1 || data.size() != n * d) return false;
    return std::all_of(data.begin(), data.end(),
                       [](double v) { return std::isfinite(v); });
}

std::vector<double> mean(const EmpiricalMeasure& mu) {
    if (!mu.valid()) throw DimensionMismatch("mean: invalid empirical measure");
    std::vector<double> out(mu.d, 0.0);
    for (std::size_t i = 0; i < mu.n; ++i) {
        const auto s = mu.sample(i);
        for (std::size_t j = 0; j < mu.d; ++j) out[j] += s[j];
    }
    for (double& v : out) v /= static_cast<double>(mu.n);
    return out;
}

double wasserstein1_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    if (!mu.valid() || !nu.valid())
        throw DimensionMismatch("wasserstein1_1d: invalid empirical measure");
    if (mu.d != 1 || nu.d != 1)
        throw DimensionMismatch("wasserstein1_1d: samples must be one-dimensional");
    if (mu.n != nu.n)
        throw DimensionMismatch("wasserstein1_1d: sample counts differ");

    std::vector<double> a = mu.data;
    std::vector<double> b = nu.data;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
    return total / static_cast<double>(a.size());
}

double d1_to_dirac0(const EmpiricalMeasure& mu) {
    if (!mu.valid()) throw DimensionMismatch("d1_to_dirac0: invalid empirical measure");
    double total = 0.0;
    for (std::size_t i = 0; i < mu.n; ++i) {
        const auto s = mu.sample(i);
        double sq = 0.0;
        for (double v : s) sq += v * v;
        total += std::sqrt(sq);
    }
    return total / static_cast<double>(mu.n);
}

}  // namespace dmr
