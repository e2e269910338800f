#include "navslip/momentum.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "navslip/error.hpp"
#include "navslip/linear_solver.hpp"
#include "navslip/operators.hpp"

namespace navslip {

void SimConfig::validate() const {
    require(grid.nx >= 2 && grid.ny >= 2, "configuration has no valid grid");
    require(viscosity >= 0.0 && std::isfinite(viscosity), "viscosity must be finite and non-negative");
    require(friction >= 0.0 && std::isfinite(friction), "friction must be finite and non-negative");
    require(dt > 0.0 && std::isfinite(dt), "time step must be positive");
    require(t_end >= 0.0 && std::isfinite(t_end), "final time must be non-negative");
    require(poisson_tol > 0.0 && poisson_tol <= 1e-4, "poisson_tol must lie in (0, 1e-4]");
    require(viscous_tol > 0.0 && viscous_tol <= 1e-4, "viscous_tol must lie in (0, 1e-4]");
    require(max_iterations > 0, "max_iterations must be positive");
    density.validate();
}

long SimConfig::step_count() const {
    if (t_end <= 0.0) return 0;
    return static_cast<long>(std::ceil(t_end / dt - 1e-9));
}

double SimConfig::effective_dt() const {
    const long n = step_count();
    return n > 0 ? t_end / static_cast<double>(n) : dt;
}

FaceField sample_forcing(const GridSpec& g, const ForcingFn& f, double t) {
    FaceField out(g);
    if (!f) return out;
    for (int j = 0; j < g.ny; ++j)
        for (int i = g.xface_begin(); i < g.xface_end(); ++i) out.x(i, j) = f(g.xf(i), g.yc(j), t).x;
    for (int j = g.yface_begin(); j < g.yface_end(); ++j)
        for (int i = 0; i < g.nx; ++i) out.y(i, j) = f(g.xc(i), g.yf(j), t).y;
    out.sync_periodic();
    return out;
}

namespace {

ScalarField mean_free(ScalarField p) {
    const double mean = integrate(p) / (p.grid.lx * p.grid.ly);
    for (int j = 0; j < p.grid.ny; ++j)
        for (int i = 0; i < p.grid.nx; ++i) p(i, j) -= mean;
    p.refresh_ghosts();
    return p;
}

} // namespace

ProjectionResult pressure_project(const VelocityField& u_star, const ScalarField& rho, double dt,
                                  const SimConfig& config, const ScalarField* guess) {
    const GridSpec& g = u_star.grid;
    require(rho.grid == g, "pressure_project: density and velocity grids differ");
    require(dt > 0.0, "pressure_project: time step must be positive");
    require(u_star.impermeable(), "pressure_project: predictor velocity is not impermeable");
    require(density_bounds(rho).first > 0.0, "pressure_project: density must be positive");

    const FaceField rho_f = face_density(rho);
    Stencil5 a(g.nx, g.ny, g.periodic_x());
    for (int j = 0; j < g.ny; ++j)
        for (int i = g.xface_begin(); i < g.xface_end(); ++i)
            a.add_edge_x(i, j, dt / rho_f.x(i, j) / (g.dx * g.dx));
    for (int j = g.yface_begin(); j < g.yface_end(); ++j)
        for (int i = 0; i < g.nx; ++i) a.add_edge_y(i, j, dt / rho_f.y(i, j) / (g.dy * g.dy));

    const ScalarField div = divergence(u_star);
    std::vector<double> b(a.size()), x(a.size(), 0.0);
    double sum = 0.0;
    double abs_sum = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            b[a.index(i, j)] = -div(i, j);
            sum += div(i, j);
            abs_sum += std::abs(div(i, j));
        }
    // Roundoff allowance: each cell divergence carries O(eps |u|/h) error.
    const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(b.size()) *
                            max_abs(u_star) / std::min(g.dx, g.dy);
    if (std::abs(sum) > 1e-10 * abs_sum + roundoff) {
        std::ostringstream msg;
        msg << "pressure_project: incompatible right-hand side (sum of divergence " << sum
            << " vs total " << abs_sum << "); impermeability was broken upstream";
        throw SolverError(msg.str());
    }
    const double mean = sum / static_cast<double>(b.size());
    for (double& v : b) v += mean;
    if (guess) {
        require(guess->grid == g, "pressure_project: warm start lives on another grid");
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) x[a.index(i, j)] = (*guess)(i, j);
    }

    SolveControl ctl;
    ctl.abs_tol = config.poisson_tol * face_l2(u_star) / std::sqrt(g.cell_area());
    ctl.max_iterations = config.max_iterations;
    ctl.singular_constant_mode = true;
    ctl.preconditioner = Preconditioner::mic0;
    ProjectionResult res;
    res.iterations = pcg(a, b, x, ctl, "pressure projection").iterations;

    ScalarField pi(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) pi(i, j) = x[a.index(i, j)];
    res.pressure = mean_free(pi);

    const FaceField grad = gradient(res.pressure);
    res.u = u_star;
    for (int j = 0; j < g.ny; ++j)
        for (int i = g.xface_begin(); i < g.xface_end(); ++i)
            res.u.x(i, j) -= dt / rho_f.x(i, j) * grad.x(i, j);
    for (int j = g.yface_begin(); j < g.yface_end(); ++j)
        for (int i = 0; i < g.nx; ++i) res.u.y(i, j) -= dt / rho_f.y(i, j) * grad.y(i, j);
    res.u.refresh_ghosts(config.friction);
    return res;
}

FluidState initial_state(const ScalarField& rho0, const InitialVelocity& v0, const SimConfig& config) {
    config.validate();
    const GridSpec& g = rho0.grid;
    require(v0.field.grid == g, "initial_state: velocity and density grids differ");
    FluidState s;
    s.rho = regularize_initial_density(rho0, config.density);
    s.pressure = ScalarField(g);

    VelocityField u(g);
    if (v0.kind == InitialVelocity::Kind::velocity) {
        u = VelocityField(v0.field);
    } else {
        const FaceField raw_f = face_density(rho0);
        const FaceField reg_f = face_density(s.rho);
        auto convert = [&](double v, double raw, double reg, const char* axis, int i, int j) {
            if (v != 0.0 && raw <= config.density.floor) {
                throw SolverError(std::string("initial_state: initial momentum is nonzero on the ") + axis +
                                  "-face (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") where the density vanishes");
            }
            return reg >= raw ? v / reg : 0.0;
        };
        for (int j = 0; j < g.ny; ++j)
            for (int i = g.xface_begin(); i < g.xface_end(); ++i)
                u.x(i, j) = convert(v0.field.x(i, j), raw_f.x(i, j), reg_f.x(i, j), "x", i, j);
        for (int j = g.yface_begin(); j < g.yface_end(); ++j)
            for (int i = 0; i < g.nx; ++i)
                u.y(i, j) = convert(v0.field.y(i, j), raw_f.y(i, j), reg_f.y(i, j), "y", i, j);
    }
    u.pin_normals();
    u.sync_periodic();
    s.u = pressure_project(u, s.rho, config.dt, config).u;
    return s;
}

namespace {

/// Assembles (rho_f + dt nu (-L)) for one velocity component and solves it.
/// `axis_x` selects the x-face unknowns.
void viscous_solve(const GridSpec& g, bool axis_x, const FaceField& rho_f, const FaceField& rhs,
                   const SimConfig& config, double dt, VelocityField& u, int& iterations) {
    const double kx = dt * config.viscosity / (g.dx * g.dx);
    const double ky = dt * config.viscosity / (g.dy * g.dy);
    const int i0 = axis_x ? g.xface_begin() : 0;
    const int i1 = axis_x ? g.xface_end() : g.nx;
    const int j0 = axis_x ? 0 : g.yface_begin();
    const int j1 = axis_x ? g.ny : g.yface_end();
    const int ni = i1 - i0;
    const int nj = j1 - j0;
    const Array2D& rf = axis_x ? rho_f.x : rho_f.y;
    const Array2D& bf = axis_x ? rhs.x : rhs.y;
    Array2D& uf = axis_x ? u.x : u.y;

    Stencil5 a(ni, nj, g.periodic_x());
    for (int jj = 0; jj < nj; ++jj)
        for (int ii = 0; ii < ni; ++ii) a.diag[a.index(ii, jj)] = rf(ii + i0, jj + j0);
    for (int jj = 0; jj < nj; ++jj)
        for (int ii = g.periodic_x() ? 0 : 1; ii < ni; ++ii) a.add_edge_x(ii, jj, kx);
    for (int jj = 1; jj < nj; ++jj)
        for (int ii = 0; ii < ni; ++ii) a.add_edge_y(ii, jj, ky);

    // Closures at the ends of each lattice line: a pinned normal neighbour adds
    // the full coupling to the diagonal, a slip ghost adds (1 - ratio) of it.
    if (axis_x) {
        const double wall = ky * (1.0 - slip_ghost_ratio(config.friction, g.dy));
        for (int ii = 0; ii < ni; ++ii) {
            a.diag[a.index(ii, 0)] += wall;
            a.diag[a.index(ii, nj - 1)] += wall;
        }
        if (!g.periodic_x())
            for (int jj = 0; jj < nj; ++jj) {
                a.diag[a.index(0, jj)] += kx;
                a.diag[a.index(ni - 1, jj)] += kx;
            }
    } else {
        for (int ii = 0; ii < ni; ++ii) {
            a.diag[a.index(ii, 0)] += ky;
            a.diag[a.index(ii, nj - 1)] += ky;
        }
        if (!g.periodic_x()) {
            const double wall = kx * (1.0 - slip_ghost_ratio(config.friction, g.dx));
            for (int jj = 0; jj < nj; ++jj) {
                a.diag[a.index(0, jj)] += wall;
                a.diag[a.index(ni - 1, jj)] += wall;
            }
        }
    }

    std::vector<double> b(a.size()), x(a.size());
    for (int jj = 0; jj < nj; ++jj)
        for (int ii = 0; ii < ni; ++ii) {
            b[a.index(ii, jj)] = bf(ii + i0, jj + j0);
            x[a.index(ii, jj)] = uf(ii + i0, jj + j0);
        }
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
    } else {
        SolveControl ctl;
        ctl.abs_tol = config.viscous_tol * bnorm;
        ctl.max_iterations = config.max_iterations;
        ctl.preconditioner = Preconditioner::mic0;
        iterations += pcg(a, b, x, ctl, axis_x ? "viscous solve (x)" : "viscous solve (y)").iterations;
    }
    for (int jj = 0; jj < nj; ++jj)
        for (int ii = 0; ii < ni; ++ii) uf(ii + i0, jj + j0) = x[a.index(ii, jj)];
}

} // namespace

VelocityField momentum_predictor(const FluidState& state, const DensityUpdate& density,
                                 const SimConfig& config, double dt, int* iterations) {
    const GridSpec& g = state.u.grid;
    VelocityField u = state.u;
    u.refresh_ghosts(config.friction);

    const FaceField rho_old = face_density(state.rho);
    const FaceField rho_new = face_density(density.rho);
    const FaceField conv = advect_momentum_flux(density.mass_flux, u);
    const FaceField force = sample_forcing(g, config.forcing, state.t + dt);
    const bool compensate = config.eps_compensation && config.density.diffusivity > 0.0;
    const FaceField psi = compensate ? face_density(density.diffusion_rate) : FaceField(g);

    FaceField rhs(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = g.xface_begin(); i < g.xface_end(); ++i)
            rhs.x(i, j) = rho_old.x(i, j) * u.x(i, j) - dt * conv.x(i, j) +
                          dt * rho_new.x(i, j) * force.x(i, j) + 0.5 * dt * psi.x(i, j) * u.x(i, j);
    for (int j = g.yface_begin(); j < g.yface_end(); ++j)
        for (int i = 0; i < g.nx; ++i)
            rhs.y(i, j) = rho_old.y(i, j) * u.y(i, j) - dt * conv.y(i, j) +
                          dt * rho_new.y(i, j) * force.y(i, j) + 0.5 * dt * psi.y(i, j) * u.y(i, j);

    VelocityField star = u;
    star.pin_normals();
    int its = 0;
    viscous_solve(g, true, rho_new, rhs, config, dt, star, its);
    viscous_solve(g, false, rho_new, rhs, config, dt, star, its);
    star.refresh_ghosts(config.friction);
    if (iterations) *iterations = its;
    return star;
}

FluidState step(const FluidState& state, const SimConfig& config, double dt, StepInfo* info) {
    const DensityUpdate dens = density_advance(state.rho, state.u, config.density, dt);
    int viscous_its = 0;
    const VelocityField star = momentum_predictor(state, dens, config, dt, &viscous_its);
    ProjectionResult proj = pressure_project(star, dens.rho, dt, config, &state.pressure);

    FluidState next;
    next.t = state.t + dt;
    next.rho = dens.rho;
    next.u = std::move(proj.u);
    next.pressure = std::move(proj.pressure);
    if (info) {
        info->viscous_iterations = viscous_its;
        info->poisson_iterations = proj.iterations;
        info->cfl = density_cfl_number(state.u, config.density, dt);
    }
    return next;
}

FluidState step(const FluidState& state, const SimConfig& config) {
    return step(state, config, config.dt);
}

} // namespace navslip
