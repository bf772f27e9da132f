#include "dmr/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dmr/errors.hpp"

namespace dmr {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + value);
    }
}

std::size_t parse_size(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v < 0 || v != std::floor(v))
        throw ConfigError("config: '" + key + "' must be a nonnegative integer");
    return static_cast<std::size_t>(v);
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text) {
    ScenarioConfig config;
    bool have_scenario = false;

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(line_no) +
                              " is not key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "scenario") {
            config.scenario_key = value;
            have_scenario = true;
        } else if (key == "T") {
            config.horizon = parse_double(key, value);
        } else if (key == "n_steps") {
            config.n_steps = parse_size(key, value);
        } else if (key == "particles") {
            config.n_particles = parse_size(key, value);
        } else if (key == "d") {
            config.d = parse_size(key, value);
        } else if (key == "seed") {
            config.seed = parse_size(key, value);
        } else if (key == "basis_degree") {
            config.basis_degree = static_cast<int>(parse_size(key, value));
        } else if (key == "picard_tol") {
            config.picard_tol = parse_double(key, value);
        } else if (key == "max_picard_iters") {
            config.max_picard_iters = parse_size(key, value);
        } else if (key == "root_tol") {
            config.root_tol = parse_double(key, value);
        } else if (key.starts_with("param.")) {
            config.params[key.substr(6)] = parse_double(key, value);
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }

    if (!have_scenario) throw ConfigError("config: missing 'scenario' key");
    const auto keys = catalog_keys();
    if (std::find(keys.begin(), keys.end(), config.scenario_key) == keys.end())
        throw ConfigError("config: unknown scenario '" + config.scenario_key + "'");
    if (config.n_particles < 2) throw ConfigError("config: particles must be >= 2");
    if (config.n_steps < 2) throw ConfigError("config: n_steps must be >= 2");
    if (config.d < 1) throw ConfigError("config: d must be >= 1");
    if (!(config.horizon > 0)) throw ConfigError("config: T must be positive");
    if (!(config.picard_tol > 0)) throw ConfigError("config: picard_tol must be positive");
    if (!(config.root_tol > 0)) throw ConfigError("config: root_tol must be positive");
    if (config.basis_degree < 0) throw ConfigError("config: basis_degree must be >= 0");
    if (config.max_picard_iters < 1)
        throw ConfigError("config: max_picard_iters must be >= 1");
    return config;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

CatalogScenario instantiate(const ScenarioConfig& config) {
    CatalogScenario entry = make_catalog_scenario(config.scenario_key, config.params);
    Scenario& sc = entry.scenario;
    sc.grid = TimeGrid(config.horizon, config.n_steps);
    sc.d = config.d;
    sc.n_particles = config.n_particles;
    sc.seed = config.seed;
    sc.basis_degree = config.basis_degree;
    sc.picard_tol = config.picard_tol;
    sc.max_picard_iters = config.max_picard_iters;
    sc.root_tol = config.root_tol;
    return entry;
}

}  // namespace dmr
