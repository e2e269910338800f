#pragma once

/// @file operators.hpp
/// @brief Staggered-grid differential operators, conservative fluxes and the slip
///        integration-by-parts check.
///
/// Every operator works on copies, so callers need not refresh ghosts first,
/// except where stored ghosts are documented as an input (deformation terms,
/// vector_laplacian). Outputs on boundary-normal faces are zero.

#include "navslip/grid.hpp"

namespace navslip {

enum class FluxMode { upwind, centered };

std::string to_string(FluxMode m);
FluxMode flux_mode_from_string(const std::string& name);

ScalarField divergence(const FaceField& u);

/// Face differences of cell values on the non-pinned faces.
FaceField gradient(const ScalarField& p);

/// Arithmetic mean of the two adjacent cells on every face (boundary faces
/// take their single neighbour).
FaceField face_density(const ScalarField& rho);

/// Symmetric-gradient inner product: cell terms for the normal strains and
/// corner terms (weighted) for the shear, all from the stored ghost values.
double deformation_inner(const VelocityField& a, const VelocityField& b);
double deformation_energy(const VelocityField& u);

/// Shear rate 1/2(d_y u_x + d_x u_y) at corner (i, j) from stored ghosts.
double corner_shear(const VelocityField& u, int i, int j);

/// Five-point component Laplacian using the stored ghosts.
FaceField vector_laplacian(const VelocityField& u);

/// Component Laplacian with tangential ghosts closed by the Navier-slip rule.
FaceField laplacian_navier(const VelocityField& u, double alpha);

/// Bilinear wall trace sum(w_a w_b ds) with wall values averaged from ghost and interior.
double boundary_trace_inner(const VelocityField& a, const VelocityField& b);

ScalarField scalar_laplacian_neumann(const ScalarField& rho);

/// Face mass flux rho*u_n with upwind or centred face density.
FaceField mass_flux(const ScalarField& rho, const VelocityField& u, FluxMode mode);

/// div(rho u) in conservative flux form.
ScalarField advect_scalar(const ScalarField& rho, const VelocityField& u,
                          FluxMode mode = FluxMode::upwind);

/// Momentum transport div(F u) over face control volumes, for a given face mass
/// flux F. Side fluxes are averages of F and the transported velocity is centred,
/// so sum(u . result) = 1/2 sum(u^2 avg(div F)).
FaceField advect_momentum_flux(const FaceField& mass_flux, const VelocityField& u);

/// Convenience form that builds F from rho and u with the given flux mode.
FaceField advect_momentum(const ScalarField& rho, const VelocityField& u,
                          FluxMode mode = FluxMode::centered);

struct IbpReport {
    double lhs = 0.0;
    double rhs_volume = 0.0;
    double rhs_boundary = 0.0;
    double mismatch = 0.0;
};

/// Evaluates -<lap f, g>, 2<D f, D g> and -2 sum_walls [D(f) n]_tan g with the
/// stored ghosts of f and g. g must be discretely divergence-free and tangent.
IbpReport ibp_identity(const VelocityField& f, const VelocityField& g);

/// Discrete curl of a corner-sampled stream function; divergence-free by
/// construction and impermeable when psi vanishes on the walls.
VelocityField curl_of_stream(const GridSpec& grid, const ScalarFn& psi);

} // namespace navslip
