#include "dmr/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "dmr/errors.hpp"
#include "dmr/io.hpp"

namespace dmr {

namespace {

using nlohmann::json;

std::vector<double> node_means(const BackwardSolution& sol) {
    std::vector<double> means(sol.grid.n_nodes());
    for (std::size_t k = 0; k < means.size(); ++k) {
        double m = 0.0;
        for (std::size_t i = 0; i < sol.n_particles; ++i) m += sol.y(k, i);
        means[k] = m / static_cast<double>(sol.n_particles);
    }
    return means;
}

json config_json(const ScenarioConfig& config) {
    json j;
    j["scenario"] = config.scenario_key;
    j["T"] = config.horizon;
    j["n_steps"] = config.n_steps;
    j["particles"] = config.n_particles;
    j["d"] = config.d;
    j["seed"] = config.seed;
    j["basis_degree"] = config.basis_degree;
    j["picard_tol"] = config.picard_tol;
    j["max_picard_iters"] = config.max_picard_iters;
    j["root_tol"] = config.root_tol;
    j["params"] = config.params;
    return j;
}

json audit_json(const AuditReport& audit) {
    json j;
    j["flat_off_residual_R"] = audit.flat_off_residual_R;
    j["flat_off_residual_L"] = audit.flat_off_residual_L;
    j["max_constraint_violation"] = audit.max_constraint_violation;
    j["tol_total"] = audit.tol_total;
    j["dynamics_residual"] = audit.dynamics_residual;
    j["mean_L"] = audit.mean_L;
    j["mean_R"] = audit.mean_R;
    j["stat_slack"] = audit.stat_slack;
    j["second_moment_diagnostic"] = audit.second_moment_diagnostic;
    return j;
}

void write_plot_csv(const std::string& path, const ReflectedSolution& sol,
                    const AuditReport& audit, const std::vector<double>& means) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("io: cannot open for writing: " + path);
    out << "series,t,value\n";
    const auto& grid = sol.backward.grid;
    auto emit = [&](const char* series, double t, double v) {
        out << series << ',' << format_double(t) << ',' << format_double(v) << '\n';
    };
    for (std::size_t k = 0; k < grid.n_nodes(); ++k) {
        emit("K", grid.t(k), sol.K[k]);
        emit("EL", grid.t(k), audit.mean_L[k]);
        emit("ER", grid.t(k), audit.mean_R[k]);
        emit("mean_Y", grid.t(k), means[k]);
    }
    for (std::size_t m = 0; m < sol.picard_history.size(); ++m)
        emit("picard_delta", static_cast<double>(m + 1), sol.picard_history[m]);
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& config, const std::string& out_dir) {
    const auto start = std::chrono::steady_clock::now();
    std::filesystem::create_directories(out_dir);

    const CatalogScenario entry = instantiate(config);
    ReflectedSolution solution = solve_reflected(entry.scenario);
    AuditReport audit = audit_solution(solution, entry.scenario);
    const auto means = node_means(solution.backward);

    RunReport report;
    report.config = config;
    report.picard_history = solution.picard_history;

    if (entry.mean_y_reference) {
        double err = 0.0;
        for (std::size_t k = 0; k < means.size(); ++k)
            err = std::max(err, std::abs(means[k] -
                                         entry.mean_y_reference(solution.backward.grid.t(k))));
        report.closed_form_mean_error = err;
    }
    if (entry.K_reference) {
        const auto ref = entry.K_reference(solution.backward.grid);
        double err = 0.0;
        for (std::size_t k = 0; k < ref.size(); ++k)
            err = std::max(err, std::abs(solution.K[k] - ref[k]));
        report.closed_form_K_error = err;
    }

    const auto dir = std::filesystem::path(out_dir);
    write_deterministic_csv(dir / "deterministic.csv", solution, audit.mean_L,
                            audit.mean_R);
    write_particles_csv(dir / "particles.csv", solution.backward);
    write_plot_csv(dir / "plot.csv", solution, audit, means);

    report.audit = std::move(audit);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json j;
    j["config"] = config_json(config);
    j["picard_history"] = report.picard_history;
    j["audit"] = audit_json(report.audit);
    j["closed_form_mean_error"] = report.closed_form_mean_error;
    j["closed_form_K_error"] = report.closed_form_K_error;
    j["wall_seconds"] = report.wall_seconds;
    std::ofstream out(dir / "report.json", std::ios::binary);
    out << j.dump(2) << '\n';
    return report;
}

SweepReport run_sweep(const ScenarioConfig& config, const std::string& axis,
                      const std::vector<double>& values, const std::string& out_dir) {
    if (values.empty()) throw ConfigError("sweep: no values given");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1]))
            throw ConfigError("sweep: values must be strictly increasing");

    SweepReport report;
    report.axis = axis;
    std::filesystem::create_directories(out_dir);

    for (std::size_t i = 0; i < values.size(); ++i) {
        ScenarioConfig point = config;
        const double v = values[i];
        if (axis == "N") {
            point.n_particles = static_cast<std::size_t>(v);
        } else if (axis == "n_steps") {
            point.n_steps = static_cast<std::size_t>(v);
        } else if (axis == "basis_degree") {
            point.basis_degree = static_cast<int>(v);
        } else if (axis == "picard_tol") {
            point.picard_tol = v;
        } else {
            throw ConfigError("sweep: unknown axis '" + axis + "'");
        }
        const auto sub = std::filesystem::path(out_dir) / (axis + "_" + std::to_string(i));
        const RunReport run = run_scenario(point, sub.string());

        SweepRow row;
        row.axis_value = v;
        row.closed_form_mean_error = run.closed_form_mean_error;
        row.closed_form_K_error = run.closed_form_K_error;
        row.final_delta = run.picard_history.empty() ? 0.0 : run.picard_history.back();
        row.iterations = run.picard_history.size();
        row.max_dynamics_residual =
            run.audit.dynamics_residual.empty()
                ? 0.0
                : *std::max_element(run.audit.dynamics_residual.begin(),
                                    run.audit.dynamics_residual.end());
        row.wall_seconds = run.wall_seconds;
        report.rows.push_back(row);
    }

    std::ofstream out(std::filesystem::path(out_dir) / "sweep.csv", std::ios::binary);
    out << "axis,value,closed_form_mean_error,closed_form_K_error,final_delta,"
           "iterations,max_dynamics_residual,wall_seconds\n";
    for (const auto& row : report.rows) {
        out << axis << ',' << format_double(row.axis_value) << ','
            << format_double(row.closed_form_mean_error) << ','
            << format_double(row.closed_form_K_error) << ','
            << format_double(row.final_delta) << ',' << row.iterations << ','
            << format_double(row.max_dynamics_residual) << ','
            << format_double(row.wall_seconds) << '\n';
    }
    return report;
}

AuditCheck run_audit(const std::string& in_dir, const ScenarioConfig& config) {
    const auto dir = std::filesystem::path(in_dir);
    const auto det = read_deterministic_csv(dir / "deterministic.csv");
    const auto particles = read_particles_csv(dir / "particles.csv");

    std::ifstream report_file(dir / "report.json");
    if (!report_file) throw ParseError("audit: missing report.json in " + in_dir);
    json stored;
    try {
        report_file >> stored;
    } catch (const json::exception& e) {
        throw ParseError(std::string("audit: bad report.json: ") + e.what());
    }

    const CatalogScenario entry = instantiate(config);
    const std::size_t n = entry.scenario.grid.n_steps;
    if (det.t.size() != n + 1 || particles.t.size() != n + 1 ||
        particles.n_particles != entry.scenario.n_particles ||
        particles.d != entry.scenario.d)
        throw ParseError("audit: exported files do not match the configuration");

    // Rebuild the solution from the exports; the ensemble is reproducible
    // from the configured seed.
    ReflectedSolution solution;
    solution.ensemble = simulate_brownian(entry.scenario.grid, entry.scenario.d,
                                          entry.scenario.n_particles,
                                          entry.scenario.seed);
    solution.backward.grid = entry.scenario.grid;
    solution.backward.d = particles.d;
    solution.backward.n_particles = particles.n_particles;
    solution.backward.Y = particles.Y;
    solution.backward.Z = particles.Z;
    solution.backward.basis_degree = entry.scenario.basis_degree;
    solution.K = det.K;
    solution.KR = det.KR;
    solution.KL = det.KL;

    AuditCheck check;
    check.recomputed = audit_solution(solution, entry.scenario);

    for (std::size_t k = 0; k <= n; ++k) {
        check.max_assembly_error = std::max(
            check.max_assembly_error, std::abs(det.K[k] - (det.KR[k] - det.KL[k])));
        check.max_report_mismatch =
            std::max({check.max_report_mismatch,
                      std::abs(check.recomputed.mean_L[k] - det.EL[k]),
                      std::abs(check.recomputed.mean_R[k] - det.ER[k])});
    }

    const auto& audit = stored.at("audit");
    auto diff = [&](const char* key, double recomputed) {
        return std::abs(audit.at(key).get<double>() - recomputed);
    };
    check.max_report_mismatch = std::max(
        {check.max_report_mismatch,
         diff("flat_off_residual_R", check.recomputed.flat_off_residual_R),
         diff("flat_off_residual_L", check.recomputed.flat_off_residual_L),
         diff("max_constraint_violation", check.recomputed.max_constraint_violation)});
    const auto stored_dyn = audit.at("dynamics_residual").get<std::vector<double>>();
    if (stored_dyn.size() != check.recomputed.dynamics_residual.size())
        throw ParseError("audit: dynamics residual length mismatch");
    for (std::size_t k = 0; k < stored_dyn.size(); ++k)
        check.max_report_mismatch =
            std::max(check.max_report_mismatch,
                     std::abs(stored_dyn[k] - check.recomputed.dynamics_residual[k]));

    check.matches = check.max_report_mismatch <= 1e-9 && check.max_assembly_error <= 1e-12;
    return check;
}

}  // namespace dmr
