#pragma once

/// @file scenarios.hpp
/// @brief Registry of the shipped test problems and their run settings.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "navslip/momentum.hpp"

namespace navslip {

/// User-facing knobs, filled from scenario defaults and then a config file.
struct RunSettings {
    int nx = 64;
    int ny = 64;
    double lx = 1.0;
    double ly = 1.0;
    double viscosity = 1e-2;
    double friction = 0.0;
    std::optional<double> diffusivity;  // empty: tie to the mesh (min(dx, dy)^2)
    double density_floor = 1e-3;
    FluxMode flux_mode = FluxMode::upwind;
    bool implicit_diffusion = false;
    bool eps_compensation = true;
    bool smoothing = true;
    double dt = 1e-3;
    double t_end = 0.1;
    double poisson_tol = 1e-12;
    double viscous_tol = 1e-12;
    int max_iterations = 20000;
    int snapshot_every = 0;  // 0 disables snapshots
};

/// Initial velocity (or momentum) field, allowed to depend on the configuration.
using InitialFieldFn = std::function<Vec2(double x, double y, const SimConfig&)>;

struct ScenarioSpec {
    std::string name;
    std::string summary;
    Topology topology = Topology::box;
    ScalarFn rho0;
    InitialVelocity::Kind velocity_kind = InitialVelocity::Kind::velocity;
    InitialFieldFn velocity0;  // u0, or the momentum rho0 u0 in momentum mode
    ForcingFn forcing;   // empty: unforced
    /// Exact (rho, u) at time t for the given configuration, if known.
    std::function<FluidState(const SimConfig&, double t)> exact;
    double viscosity_min = 0.0;
    double viscosity_max = 1e300;
    double friction_min = 0.0;
    double friction_max = 1e300;
    RunSettings defaults;
};

std::vector<std::string> scenario_names();

/// Throws SolverError listing the registry for unknown names.
ScenarioSpec scenario(const std::string& name);

/// Builds the solver configuration, checking the scenario's admissible ranges.
SimConfig make_config(const ScenarioSpec& spec, const RunSettings& settings);

/// Regularized, projected initial state of the scenario on config.grid.
FluidState scenario_initial_state(const ScenarioSpec& spec, const SimConfig& config);

/// Smallest positive root of k tan(k/2) = 2 alpha, found by bisection on (0, pi).
/// For a channel of height Ly the mode is cos(k (y/Ly - 1/2)) with
/// k = robin_wavenumber(alpha Ly), decaying at rate nu k^2 / (Ly^2 rho).
double robin_wavenumber(double alpha);


} // namespace navslip
