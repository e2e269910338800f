#include "navslip/density.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "navslip/error.hpp"
#include "navslip/linear_solver.hpp"

namespace navslip {

void DensityParams::validate() const {
    require(diffusivity >= 0.0 && std::isfinite(diffusivity),
            "density diffusivity must be finite and non-negative");
    require(floor > 0.0, "density floor must be positive");
    require(implicit_tol > 0.0, "implicit diffusion tolerance must be positive");
}

ScalarField regularize_initial_density(const ScalarField& rho0, const DensityParams& params) {
    params.validate();
    const GridSpec& g = rho0.grid;
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double v = rho0(i, j);
            require(v >= 0.0 && std::isfinite(v),
                    "initial density must be finite and non-negative (cell " + std::to_string(i) +
                        "," + std::to_string(j) + ")");
            out(i, j) = std::max(v, params.floor);
        }
    out.refresh_ghosts();
    if (!params.smoothing) return out;

    ScalarField smooth(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            smooth(i, j) = 0.5 * out(i, j) +
                           0.125 * (out(i + 1, j) + out(i - 1, j) + out(i, j + 1) + out(i, j - 1));
    smooth.refresh_ghosts();
    return smooth;
}

double density_cfl_number(const VelocityField& u, const DensityParams& params, double dt) {
    const GridSpec& g = u.grid;
    double ux = 0.0;
    double uy = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) ux = std::max(ux, std::abs(u.x(i, j)));
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) uy = std::max(uy, std::abs(u.y(i, j)));
    double rate = ux / g.dx + uy / g.dy;
    if (!params.implicit_diffusion)
        rate += 2.0 * params.diffusivity * (1.0 / (g.dx * g.dx) + 1.0 / (g.dy * g.dy));
    return dt * rate;
}

namespace {

ScalarField implicit_diffusion_solve(const ScalarField& rhs, double coef, double tol) {
    // (I - coef L) x = rhs with L the Neumann five-point Laplacian.
    const GridSpec& g = rhs.grid;
    Stencil5 a(g.nx, g.ny, g.periodic_x());
    for (std::size_t k = 0; k < a.size(); ++k) a.diag[k] = 1.0;
    const double wx = coef / (g.dx * g.dx);
    const double wy = coef / (g.dy * g.dy);
    for (int j = 0; j < g.ny; ++j)
        for (int i = g.periodic_x() ? 0 : 1; i < g.nx; ++i) a.add_edge_x(i, j, wx);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) a.add_edge_y(i, j, wy);

    std::vector<double> b(a.size()), x(a.size());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) b[a.index(i, j)] = x[a.index(i, j)] = rhs(i, j);
    SolveControl ctl;
    ctl.abs_tol = tol * norm2(b);
    pcg(a, b, x, ctl, "implicit density diffusion");
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out(i, j) = x[a.index(i, j)];
    out.refresh_ghosts();
    return out;
}

} // namespace

DensityUpdate density_advance(const ScalarField& rho, const VelocityField& u,
                              const DensityParams& params, double dt) {
    params.validate();
    require(dt > 0.0, "density_step: time step must be positive");
    require(rho.grid == u.grid, "density_step: density and velocity grids differ");
    const GridSpec& g = rho.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            require(rho(i, j) > 0.0, "density_step: non-positive density at cell " +
                                         std::to_string(i) + "," + std::to_string(j));
    const double cfl = density_cfl_number(u, params, dt);
    if (cfl > 1.0) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "density_step: CFL ratio dt*(|u_x|/dx + |u_y|/dy"
            << (params.implicit_diffusion ? "" : " + 2eps/dx^2 + 2eps/dy^2") << ") = " << cfl
            << " exceeds 1";
        throw SolverError(msg.str());
    }

    DensityUpdate up;
    up.mass_flux = mass_flux(rho, u, params.flux_mode);
    const ScalarField div_f = divergence(up.mass_flux);
    ScalarField transported(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) transported(i, j) = rho(i, j) - dt * div_f(i, j);

    up.diffusion_rate = ScalarField(g);
    if (params.diffusivity == 0.0) {
        up.rho = transported;
    } else if (params.implicit_diffusion) {
        up.rho = implicit_diffusion_solve(transported, dt * params.diffusivity, params.implicit_tol);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                up.diffusion_rate(i, j) = (up.rho(i, j) - transported(i, j)) / dt;
    } else {
        const ScalarField lap = scalar_laplacian_neumann(rho);
        up.rho = ScalarField(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                up.diffusion_rate(i, j) = params.diffusivity * lap(i, j);
                up.rho(i, j) = transported(i, j) + dt * up.diffusion_rate(i, j);
            }
    }
    up.rho.refresh_ghosts();
    up.diffusion_rate.refresh_ghosts();
    return up;
}

ScalarField density_step(const ScalarField& rho, const VelocityField& u,
                         const DensityParams& params, double dt) {
    return density_advance(rho, u, params, dt).rho;
}

std::pair<double, double> density_bounds(const ScalarField& rho) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int j = 0; j < rho.grid.ny; ++j)
        for (int i = 0; i < rho.grid.nx; ++i) {
            lo = std::min(lo, rho(i, j));
            hi = std::max(hi, rho(i, j));
        }
    return {lo, hi};
}

} // namespace navslip
