#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "dmr/catalog.hpp"

namespace dmr {

// Flat key=value scenario configuration. Unknown keys and out-of-range
// values raise ConfigError. Scenario-specific parameters use the
// "param.<name>" prefix.
struct ScenarioConfig {
    std::string scenario_key;
    double horizon = 1.0;
    std::size_t n_steps = 50;
    std::size_t n_particles = 2000;
    std::size_t d = 1;
    std::uint64_t seed = 20240811;
    int basis_degree = 4;
    double picard_tol = 1e-6;
    std::size_t max_picard_iters = 50;
    double root_tol = 1e-10;
    std::map<std::string, double> params;
};

ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// Instantiates the catalog scenario with the config's grid/tolerances.
CatalogScenario instantiate(const ScenarioConfig& config);

}  // namespace dmr
