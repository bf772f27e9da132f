#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dmr/reflected.hpp"

namespace dmr {

// A catalog entry: the scenario plus any closed-form references it admits.
struct CatalogScenario {
    std::string key;
    Scenario scenario;
    std::map<std::string, double> params;
    // Reference for mean(Y_t) where a closed form exists (linear mean-field
    // ODE, unconstrained drift path).
    std::function<double(double t)> mean_y_reference;
    // Reference forward regulator where the affine oracle applies.
    std::function<std::vector<double>(const TimeGrid&)> K_reference;
};

std::vector<std::string> catalog_keys();

// Builds a catalog scenario. overrides replace the per-scenario parameter
// defaults (drift, barrier levels, ...). Throws ConfigError on an unknown
// key or parameter.
CatalogScenario make_catalog_scenario(const std::string& key,
                                      const std::map<std::string, double>& overrides = {});

// The truncated-log Mao modulus: r ln(1/r) below the knee, linear above.
double mao_log_rho(double r);

}  // namespace dmr
