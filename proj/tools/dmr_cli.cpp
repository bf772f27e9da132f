#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmr/errors.hpp"
#include "dmr/runner.hpp"

namespace {

dmr::ScenarioConfig load_with_overrides(const std::string& scenario_file,
                                        std::optional<std::uint64_t> seed,
                                        std::optional<std::size_t> particles,
                                        std::optional<std::size_t> steps,
                                        std::optional<double> picard_tol) {
    dmr::ScenarioConfig config = dmr::load_config(scenario_file);
    if (seed) config.seed = *seed;
    if (particles) config.n_particles = *particles;
    if (steps) config.n_steps = *steps;
    if (picard_tol) config.picard_tol = *picard_tol;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Doubly mean-reflected MFBSDE solver"};
    app.require_subcommand(1);

    std::string scenario_file;
    std::string out_dir;
    std::string in_dir;
    std::string axis;
    std::vector<double> values;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> particles;
    std::optional<std::size_t> steps;
    std::optional<double> picard_tol;

    auto* run = app.add_subcommand("run", "solve a scenario and export artifacts");
    run->add_option("--scenario", scenario_file, "scenario config file")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--seed", seed, "RNG seed override");
    run->add_option("--particles", particles, "particle count override");
    run->add_option("--steps", steps, "time step count override");
    run->add_option("--picard-tol", picard_tol, "Picard tolerance override");

    auto* sweep = app.add_subcommand("sweep", "run a scenario across one axis");
    sweep->add_option("--scenario", scenario_file, "scenario config file")->required();
    sweep->add_option("--axis", axis, "one of N, n_steps, basis_degree, picard_tol")
        ->required();
    sweep->add_option("--values", values, "comma-separated axis values")
        ->required()
        ->delimiter(',');
    sweep->add_option("--out", out_dir, "output directory")->required();

    auto* audit = app.add_subcommand("audit", "recompute residuals from exports");
    audit->add_option("--in", in_dir, "directory produced by run")->required();
    audit->add_option("--scenario", scenario_file, "scenario config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const dmr::ScenarioConfig config =
                load_with_overrides(scenario_file, seed, particles, steps, picard_tol);
            const dmr::RunReport report = dmr::run_scenario(config, out_dir);
            std::printf("scenario %s: %zu Picard iterations, final delta %.3e\n",
                        config.scenario_key.c_str(), report.picard_history.size(),
                        report.picard_history.empty() ? 0.0
                                                      : report.picard_history.back());
            std::printf("flat-off residuals R=%.3e L=%.3e, tol_total %.3e\n",
                        report.audit.flat_off_residual_R,
                        report.audit.flat_off_residual_L, report.audit.tol_total);
            if (report.closed_form_mean_error >= 0.0)
                std::printf("closed-form mean error %.3e\n", report.closed_form_mean_error);
            if (report.closed_form_K_error >= 0.0)
                std::printf("closed-form K error %.3e\n", report.closed_form_K_error);
            if (report.audit.max_constraint_violation > 0.0) {
                std::fprintf(stderr, "constraint violation beyond tolerance: %.3e\n",
                             report.audit.max_constraint_violation);
                return 1;
            }
        } else if (sweep->parsed()) {
            const dmr::ScenarioConfig config = dmr::load_config(scenario_file);
            const dmr::SweepReport report = dmr::run_sweep(config, axis, values, out_dir);
            for (const auto& row : report.rows)
                std::printf("%s=%g: iters=%zu final_delta=%.3e mean_err=%.3e "
                            "K_err=%.3e dyn=%.3e (%.2fs)\n",
                            axis.c_str(), row.axis_value, row.iterations,
                            row.final_delta, row.closed_form_mean_error,
                            row.closed_form_K_error, row.max_dynamics_residual,
                            row.wall_seconds);
        } else if (audit->parsed()) {
            const dmr::ScenarioConfig config = dmr::load_config(scenario_file);
            const dmr::AuditCheck check = dmr::run_audit(in_dir, config);
            std::printf("audit: report mismatch %.3e, assembly error %.3e, "
                        "flat-off R=%.3e L=%.3e\n",
                        check.max_report_mismatch, check.max_assembly_error,
                        check.recomputed.flat_off_residual_R,
                        check.recomputed.flat_off_residual_L);
            if (!check.matches) {
                std::fprintf(stderr, "audit: exported artifacts do not reproduce the report\n");
                return 1;
            }
        }
    } catch (const dmr::PicardNotConverged& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        for (std::size_t m = 0; m < e.history.size(); ++m)
            std::fprintf(stderr, "  delta_%zu = %.6e\n", m + 1, e.history[m]);
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
