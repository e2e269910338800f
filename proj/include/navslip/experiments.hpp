#pragma once

/// @file experiments.hpp
/// @brief Scenario runs, viscosity sweeps, rate fitting and result files.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "navslip/diagnostics.hpp"
#include "navslip/scenarios.hpp"

namespace navslip {

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> points;
};

/// Least squares of log(error) against log(nu). Needs two distinct abscissae and
/// strictly positive values.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

using StepObserver = std::function<void(long step, const FluidState&, const EnergyLedger&, const StepInfo&)>;

struct RunOptions {
    std::string out_dir;         // empty: nothing written
    int snapshot_every = 0;      // 0: no snapshots
    bool keep_trajectory = false;
    StepObserver observer;
};

struct RunResult {
    FluidState initial;
    FluidState final_state;
    std::vector<EnergyLedger> ledger;     // one entry per step, index 0 = initial
    std::vector<FluidState> trajectory;   // only with keep_trajectory
    double mass_initial = 0.0;
    double max_mass_drift = 0.0;          // relative
    double rho_min = 0.0;
    double rho_max = 0.0;
    long steps = 0;
    double seconds = 0.0;
};

/// Advances the scenario to config.t_end. Errors carry the failing step index.
RunResult run(const ScenarioSpec& spec, const SimConfig& config, const RunOptions& options = {});

/// ledger.csv: step,t,kinetic,dissipation_acc,friction_acc,work_acc,residual
void write_ledger_csv(const std::string& path, const std::vector<EnergyLedger>& ledger);

/// Raw little-endian doubles (interior values, i fastest) plus a text sidecar.
void write_snapshot(const std::string& dir, long step, const FluidState& state);

struct SweepRow {
    double nu = 0.0;
    double err_u_l2 = 0.0;
    double err_rho_l2 = 0.0;
    double lhs = 0.0;
    double visc_term = 0.0;
    double fitted_C = 0.0;
    double slope_running = 0.0;  // NaN until two rows exist
};

struct SweepOptions {
    std::string out_dir;        // sweep.csv and the resume sidecar; empty: in-memory only
    int workers = 0;            // 0: hardware concurrency
    bool deterministic = false; // forces a single worker
    std::function<void(const SweepRow&)> on_row;
};

struct SweepResult {
    std::string scenario;
    std::vector<double> viscosities;  // strictly decreasing
    std::vector<SweepRow> rows;
    std::vector<BoundReport> reports;
    std::optional<RateFit> fit;       // absent when the errors do not admit a fit
    std::string fit_note;
    std::vector<double> wall_seconds;
    bool lhs_monotone_in_t = true;
    bool lhs_monotone_in_nu = true;
    bool any_violation = false;
    int resumed_members = 0;
};

/// Runs every viscosity, compares against the scenario's exact solution (or a
/// Richardson reference at a tenth of the smallest viscosity on a doubled mesh),
/// and assembles bound reports plus the rate fit of err_u_l2 against nu.
SweepResult sweep(const ScenarioSpec& spec, const RunSettings& settings, std::vector<double> viscosities,
                  const SweepOptions& options = {});

std::string format_double(double v);

} // namespace navslip
