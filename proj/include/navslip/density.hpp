#pragma once

/// @file density.hpp
/// @brief Diffusion-regularized transport of the density with Neumann walls.

#include <utility>

#include "navslip/grid.hpp"
#include "navslip/operators.hpp"

namespace navslip {

struct DensityParams {
    double diffusivity = 0.0;  // regularization diffusivity (length^2/time)
    double floor = 1e-3;       // lower bound imposed on the initial density
    FluxMode flux_mode = FluxMode::upwind;
    bool implicit_diffusion = false;
    bool smoothing = true;     // one conservative smoothing pass after the clamp
    double implicit_tol = 1e-14;

    void validate() const;
};

/// max(rho0, floor) followed, when enabled, by rho + 1/8 (E + W + N + S - 4 rho)
/// with mirror ghosts: a convex, mass-preserving average.
ScalarField regularize_initial_density(const ScalarField& rho0, const DensityParams& params);

/// One explicit (or diffusion-implicit) step together with the face mass flux and
/// the diffusion rate actually applied, which the momentum update reuses.
struct DensityUpdate {
    ScalarField rho;
    FaceField mass_flux;
    ScalarField diffusion_rate;  // (rho' - rho)/dt + div(mass_flux)
};

/// Stability/monotonicity number dt*(|u_x|/dx + |u_y|/dy + 2 eps/dx^2 + 2 eps/dy^2);
/// the diffusive part is omitted for implicit diffusion. Must not exceed 1.
double density_cfl_number(const VelocityField& u, const DensityParams& params, double dt);

DensityUpdate density_advance(const ScalarField& rho, const VelocityField& u,
                              const DensityParams& params, double dt);

ScalarField density_step(const ScalarField& rho, const VelocityField& u,
                         const DensityParams& params, double dt);

/// (min, max) over interior cells.
std::pair<double, double> density_bounds(const ScalarField& rho);

} // namespace navslip
