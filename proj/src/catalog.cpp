#include "dmr/catalog.hpp"

#include <cmath>

#include "dmr/errors.hpp"

namespace dmr {

namespace {

constexpr double kMaoKnee = 0.1353352832366127;  // e^-2, where slope reaches 1

LossFieldPair affine_losses(double upper_level, double lower_level) {
    LossFieldPair losses;
    losses.L = [upper_level](double, double x, double) { return x - upper_level; };
    losses.R = [lower_level](double, double x, double) { return x - lower_level; };
    losses.c = 1.0;
    losses.C = 1.0;
    losses.gap = upper_level - lower_level;
    losses.M = std::max(std::abs(upper_level), std::abs(lower_level));
    return losses;
}

double param(const std::map<std::string, double>& params, const std::string& name) {
    return params.at(name);
}

void apply_overrides(std::map<std::string, double>& params,
                     const std::map<std::string, double>& overrides,
                     const std::string& key) {
    for (const auto& [name, value] : overrides) {
        if (!params.contains(name))
            throw ConfigError("catalog: scenario '" + key +
                              "' has no parameter '" + name + "'");
        params[name] = value;
    }
}

}  // namespace

double mao_log_rho(double r) {
    if (r <= 0.0) return 0.0;
    if (r <= kMaoKnee) return r * std::log(1.0 / r);
    return kMaoKnee * 2.0 + (r - kMaoKnee);  // C^1 linear extension
}

std::vector<std::string> catalog_keys() {
    return {"inactive_barriers", "constant_drift_lower_barrier", "linear_meanfield",
            "mao_log_driver", "nonlinear_losses"};
}

CatalogScenario make_catalog_scenario(const std::string& key,
                                      const std::map<std::string, double>& overrides) {
    CatalogScenario entry;
    entry.key = key;
    Scenario& sc = entry.scenario;
    sc.grid = TimeGrid(1.0, 50);
    sc.d = 1;
    sc.n_particles = 2000;
    sc.seed = 20240811;

    if (key == "inactive_barriers") {
        entry.params = {{"barrier_width", 100.0}};
        apply_overrides(entry.params, overrides, key);
        const double w = param(entry.params, "barrier_width");
        sc.generator.name = "zero";
        sc.generator.evaluator = [](double, double, const EmpiricalMeasure&,
                                    std::span<const double>,
                                    const EmpiricalMeasure&) { return 0.0; };
        sc.generator.regularity = Regularity::lipschitz;
        sc.generator.lambda = 0.0;
        sc.terminal = {"brownian_terminal",
                       [](std::span<const double> b) { return b[0]; }};
        sc.losses = affine_losses(w, -w);
    } else if (key == "constant_drift_lower_barrier") {
        entry.params = {{"drift", -1.0}, {"upper_level", 10.0}, {"lower_level", 0.5}};
        apply_overrides(entry.params, overrides, key);
        const double drift = param(entry.params, "drift");
        const double upper = param(entry.params, "upper_level");
        const double lower = param(entry.params, "lower_level");
        sc.generator.name = "constant_drift";
        sc.generator.evaluator = [drift](double, double, const EmpiricalMeasure&,
                                         std::span<const double>,
                                         const EmpiricalMeasure&) { return drift; };
        sc.generator.regularity = Regularity::lipschitz;
        sc.generator.lambda = 0.0;
        sc.terminal = {"brownian_plus_one",
                       [](std::span<const double> b) { return b[0] + 1.0; }};
        sc.losses = affine_losses(upper, lower);

        // Unconstrained mean path E[y_t] = 1 + drift (T - t); only the lower
        // barrier binds when it dips below lower_level.
        entry.mean_y_reference = [drift](double t) { return 1.0 + drift * (1.0 - t); };
        entry.K_reference = [drift, lower](const TimeGrid& grid) {
            const std::size_t n = grid.n_steps;
            std::vector<double> kbar(n + 1);
            double running = 0.0;
            for (std::size_t j = 0; j <= n; ++j) {
                const double s_rev = 1.0 + drift * grid.t(j);
                running = std::max(running, lower - s_rev);
                kbar[j] = std::max(0.0, running);
            }
            std::vector<double> K(n + 1);
            for (std::size_t k = 0; k <= n; ++k)
                K[k] = kbar[n] - (k == n ? 0.0 : kbar[n - k]);
            return K;
        };
    } else if (key == "linear_meanfield") {
        entry.params = {{"barrier_width", 100.0}};
        apply_overrides(entry.params, overrides, key);
        const double w = param(entry.params, "barrier_width");
        sc.generator.name = "mean_field_linear";
        sc.generator.evaluator = [](double, double, const EmpiricalMeasure& mu,
                                    std::span<const double>,
                                    const EmpiricalMeasure&) { return mean(mu)[0]; };
        sc.generator.regularity = Regularity::lipschitz;
        sc.generator.lambda = 1.0;
        sc.terminal = {"brownian_plus_one",
                       [](std::span<const double> b) { return b[0] + 1.0; }};
        sc.losses = affine_losses(w, -w);
        entry.mean_y_reference = [](double t) { return std::exp(1.0 - t); };
    } else if (key == "mao_log_driver") {
        entry.params = {{"drift_scale", 0.6}, {"meanfield_scale", 0.2},
                        {"z_scale", 0.1}, {"upper_level", 2.0}, {"lower_level", -0.2}};
        apply_overrides(entry.params, overrides, key);
        const double a = param(entry.params, "drift_scale");
        const double b = param(entry.params, "meanfield_scale");
        const double zc = param(entry.params, "z_scale");
        sc.generator.name = "mao_log";
        sc.generator.evaluator = [a, b, zc](double, double y, const EmpiricalMeasure& mu,
                                            std::span<const double> z,
                                            const EmpiricalMeasure&) {
            return -a * std::sqrt(mao_log_rho(y * y)) - b * d1_to_dirac0(mu) + zc * z[0];
        };
        sc.generator.regularity = Regularity::mao;
        sc.generator.lambda = 0.5;
        sc.generator.beta = 1.5;
        sc.generator.rho = mao_log_rho;
        sc.terminal = {"half_brownian_plus_half",
                       [](std::span<const double> b) { return 0.5 + 0.5 * b[0]; }};
        sc.losses = affine_losses(param(entry.params, "upper_level"),
                                  param(entry.params, "lower_level"));
    } else if (key == "nonlinear_losses") {
        entry.params = {{"drift", -2.0}, {"upper_level", 2.0}, {"lower_offset", 1.0}};
        apply_overrides(entry.params, overrides, key);
        const double drift = param(entry.params, "drift");
        const double upper = param(entry.params, "upper_level");
        const double off = param(entry.params, "lower_offset");
        sc.generator.name = "constant_drift";
        sc.generator.evaluator = [drift](double, double, const EmpiricalMeasure&,
                                         std::span<const double>,
                                         const EmpiricalMeasure&) { return drift; };
        sc.generator.regularity = Regularity::lipschitz;
        sc.generator.lambda = 0.0;
        sc.terminal = {"brownian_terminal",
                       [](std::span<const double> b) { return b[0]; }};
        sc.losses.L = [upper](double, double x, double) {
            return x + 0.2 * std::atan(x) - upper;
        };
        sc.losses.R = [off](double, double x, double) {
            return x + 0.2 * std::atan(x) + off;
        };
        sc.losses.c = 1.0;
        sc.losses.C = 1.2;
        sc.losses.gap = upper + off;
        sc.losses.M = upper + 0.2 * 1.5707963267948966;
    } else {
        throw ConfigError("catalog: unknown scenario key '" + key + "'");
    }
    return entry;
}

}  // namespace dmr
