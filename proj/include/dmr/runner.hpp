#pragma once

#include <string>
#include <vector>

#include "dmr/config.hpp"
#include "dmr/reflected.hpp"

namespace dmr {

struct RunReport {
    ScenarioConfig config;
    std::vector<double> picard_history;
    AuditReport audit;
    double closed_form_mean_error = -1.0;  // -1 when no reference applies
    double closed_form_K_error = -1.0;
    double wall_seconds = 0.0;
};

// Solves the configured scenario and writes deterministic.csv,
// particles.csv, report.json and plot.csv into out_dir.
RunReport run_scenario(const ScenarioConfig& config, const std::string& out_dir);

struct SweepRow {
    double axis_value = 0.0;
    double closed_form_mean_error = -1.0;
    double closed_form_K_error = -1.0;
    double final_delta = 0.0;
    std::size_t iterations = 0;
    double max_dynamics_residual = 0.0;
    double wall_seconds = 0.0;
};

struct SweepReport {
    std::string axis;
    std::vector<SweepRow> rows;
};

// Re-runs the scenario for each axis value (one of N, n_steps, basis_degree,
// picard_tol) and writes sweep.csv into out_dir.
SweepReport run_sweep(const ScenarioConfig& config, const std::string& axis,
                      const std::vector<double>& values, const std::string& out_dir);

struct AuditCheck {
    AuditReport recomputed;
    double max_report_mismatch = 0.0;  // vs the stored report.json residuals
    double max_assembly_error = 0.0;   // K - (KR - KL) from the exported table
    bool matches = false;
};

// Recomputes all residuals from the files produced by run_scenario and
// compares them with the stored report.
AuditCheck run_audit(const std::string& in_dir, const ScenarioConfig& config);

}  // namespace dmr
