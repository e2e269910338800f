#pragma once

/// @file momentum.hpp
/// @brief Density-weighted semi-implicit momentum update with variable-density projection.

#include <functional>
#include <optional>

#include "navslip/density.hpp"
#include "navslip/grid.hpp"

namespace navslip {

/// Body force f(x, y, t).
using ForcingFn = std::function<Vec2(double, double, double)>;

struct SimConfig {
    GridSpec grid;
    double viscosity = 0.0;
    double friction = 0.0;
    DensityParams density;
    double dt = 1e-3;
    double t_end = 0.0;
    double poisson_tol = 1e-12;
    double viscous_tol = 1e-12;
    int max_iterations = 20000;
    bool eps_compensation = true;  // the (eps/2)(lap rho) u momentum term
    ForcingFn forcing;             // empty means f = 0

    void validate() const;
    /// Number of steps to reach t_end with a step no larger than dt.
    long step_count() const;
    /// dt adjusted so that step_count() steps land exactly on t_end.
    double effective_dt() const;
};

struct FluidState {
    double t = 0.0;
    ScalarField rho;
    VelocityField u;
    ScalarField pressure;  // mean-zero gauge
};

/// Either the initial momentum rho0*u0 or the initial velocity u0.
struct InitialVelocity {
    enum class Kind { momentum, velocity } kind = Kind::velocity;
    FaceField field;
};

/// Samples f at time t on the faces (zero on boundary-normal faces).
FaceField sample_forcing(const GridSpec& grid, const ForcingFn& f, double t);

/// Builds the regularized initial state. In momentum mode the initial momentum
/// must vanish on faces whose mean input density is at or below the floor, and it
/// is kept only where the regularized face density is not below the input one.
FluidState initial_state(const ScalarField& rho0, const InitialVelocity& v0, const SimConfig& config);

struct ProjectionResult {
    VelocityField u;
    ScalarField pressure;
    int iterations = 0;
};

/// Solves -div(dt/rho_f grad pi) = -div u*, then u = u* - dt/rho_f grad pi.
/// Stops once ||div u||_2 <= poisson_tol ||u*||_2. Optional warm start for pi.
ProjectionResult pressure_project(const VelocityField& u_star, const ScalarField& rho, double dt,
                                  const SimConfig& config, const ScalarField* guess = nullptr);

/// Predictor: (rho_new,f - dt nu L) u* = rho_f u - dt C + dt rho_new,f f + dt/2 avg(psi) u,
/// where C uses the density step's mass flux and psi its applied diffusion rate.
VelocityField momentum_predictor(const FluidState& state, const DensityUpdate& density,
                                 const SimConfig& config, double dt, int* iterations = nullptr);

struct StepInfo {
    int viscous_iterations = 0;
    int poisson_iterations = 0;
    double cfl = 0.0;
};

FluidState step(const FluidState& state, const SimConfig& config, double dt, StepInfo* info = nullptr);
FluidState step(const FluidState& state, const SimConfig& config);

} // namespace navslip
