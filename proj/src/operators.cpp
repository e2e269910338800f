#include "navslip/operators.hpp"

#include <cmath>

#include "navslip/error.hpp"

namespace navslip {

std::string to_string(FluxMode m) {
    return m == FluxMode::upwind ? "upwind" : "centered";
}

FluxMode flux_mode_from_string(const std::string& name) {
    if (name == "upwind") return FluxMode::upwind;
    if (name == "centered" || name == "centred") return FluxMode::centered;
    throw SolverError("unknown flux mode '" + name + "' (expected upwind or centered)");
}

namespace {

ScalarField closed(const ScalarField& s) {
    ScalarField c = s;
    c.refresh_ghosts();
    return c;
}

FaceField synced(const FaceField& f) {
    FaceField c = f;
    c.sync_periodic();
    return c;
}

VelocityField synced(const VelocityField& f) {
    VelocityField c = f;
    c.sync_periodic();
    return c;
}

} // namespace

ScalarField divergence(const FaceField& u_in) {
    const FaceField u = synced(u_in);
    const GridSpec& g = u.grid;
    ScalarField d(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            d(i, j) = (u.x(i + 1, j) - u.x(i, j)) / g.dx + (u.y(i, j + 1) - u.y(i, j)) / g.dy;
    d.refresh_ghosts();
    return d;
}

FaceField gradient(const ScalarField& p_in) {
    const ScalarField p = closed(p_in);
    const GridSpec& g = p.grid;
    FaceField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = g.xface_begin(); i < g.xface_end(); ++i)
            out.x(i, j) = (p(i, j) - p(i - 1, j)) / g.dx;
    for (int j = g.yface_begin(); j < g.yface_end(); ++j)
        for (int i = 0; i < g.nx; ++i) out.y(i, j) = (p(i, j) - p(i, j - 1)) / g.dy;
    out.sync_periodic();
    return out;
}

FaceField face_density(const ScalarField& rho_in) {
    const ScalarField rho = closed(rho_in);
    const GridSpec& g = rho.grid;
    FaceField out(g);
    // Box walls: the Neumann ghost makes the mean equal to the single interior neighbour.
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) out.x(i, j) = 0.5 * (rho(i - 1, j) + rho(i, j));
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out.y(i, j) = 0.5 * (rho(i, j - 1) + rho(i, j));
    out.sync_periodic();
    return out;
}

double corner_shear(const VelocityField& u, int i, int j) {
    const GridSpec& g = u.grid;
    return 0.5 * ((u.x(i, j) - u.x(i, j - 1)) / g.dy + (u.y(i, j) - u.y(i - 1, j)) / g.dx);
}

double deformation_inner(const VelocityField& a_in, const VelocityField& b_in) {
    const VelocityField a = synced(a_in);
    const VelocityField b = synced(b_in);
    const GridSpec& g = a.grid;
    double cells = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double axx = (a.x(i + 1, j) - a.x(i, j)) / g.dx;
            const double ayy = (a.y(i, j + 1) - a.y(i, j)) / g.dy;
            const double bxx = (b.x(i + 1, j) - b.x(i, j)) / g.dx;
            const double byy = (b.y(i, j + 1) - b.y(i, j)) / g.dy;
            cells += axx * bxx + ayy * byy;
        }
    double corners = 0.0;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.corner_i_end(); ++i)
            corners += g.corner_weight(i, j) * 2.0 * corner_shear(a, i, j) * corner_shear(b, i, j);
    return (cells + corners) * g.cell_area();
}

double deformation_energy(const VelocityField& u) {
    return deformation_inner(u, u);
}

FaceField vector_laplacian(const VelocityField& u_in) {
    const VelocityField u = synced(u_in);
    const GridSpec& g = u.grid;
    const double ix2 = 1.0 / (g.dx * g.dx);
    const double iy2 = 1.0 / (g.dy * g.dy);
    FaceField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = g.xface_begin(); i < g.xface_end(); ++i)
            out.x(i, j) = (u.x(i + 1, j) - 2.0 * u.x(i, j) + u.x(i - 1, j)) * ix2 +
                          (u.x(i, j + 1) - 2.0 * u.x(i, j) + u.x(i, j - 1)) * iy2;
    for (int j = g.yface_begin(); j < g.yface_end(); ++j)
        for (int i = 0; i < g.nx; ++i)
            out.y(i, j) = (u.y(i + 1, j) - 2.0 * u.y(i, j) + u.y(i - 1, j)) * ix2 +
                          (u.y(i, j + 1) - 2.0 * u.y(i, j) + u.y(i, j - 1)) * iy2;
    out.sync_periodic();
    return out;
}

FaceField laplacian_navier(const VelocityField& u, double alpha) {
    require(alpha >= 0.0, "laplacian_navier: friction coefficient must be non-negative");
    VelocityField c = u;
    c.refresh_ghosts(alpha);
    return vector_laplacian(c);
}

double boundary_trace_inner(const VelocityField& a_in, const VelocityField& b_in) {
    const VelocityField a = synced(a_in);
    const VelocityField b = synced(b_in);
    const GridSpec& g = a.grid;
    double sum = 0.0;
    for (int i = 0; i < g.corner_i_end(); ++i) {
        const double w = g.periodic_x() ? 1.0 : ((i == 0 || i == g.nx) ? 0.5 : 1.0);
        const double ab = 0.5 * (a.x(i, -1) + a.x(i, 0));
        const double bb = 0.5 * (b.x(i, -1) + b.x(i, 0));
        const double at = 0.5 * (a.x(i, g.ny - 1) + a.x(i, g.ny));
        const double bt = 0.5 * (b.x(i, g.ny - 1) + b.x(i, g.ny));
        sum += w * (ab * bb + at * bt) * g.dx;
    }
    if (!g.periodic_x()) {
        for (int j = 0; j <= g.ny; ++j) {
            const double w = (j == 0 || j == g.ny) ? 0.5 : 1.0;
            const double al = 0.5 * (a.y(-1, j) + a.y(0, j));
            const double bl = 0.5 * (b.y(-1, j) + b.y(0, j));
            const double ar = 0.5 * (a.y(g.nx - 1, j) + a.y(g.nx, j));
            const double br = 0.5 * (b.y(g.nx - 1, j) + b.y(g.nx, j));
            sum += w * (al * bl + ar * br) * g.dy;
        }
    }
    return sum;
}

ScalarField scalar_laplacian_neumann(const ScalarField& rho_in) {
    const ScalarField r = closed(rho_in);
    const GridSpec& g = r.grid;
    const double ix2 = 1.0 / (g.dx * g.dx);
    const double iy2 = 1.0 / (g.dy * g.dy);
    ScalarField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = (r(i + 1, j) - 2.0 * r(i, j) + r(i - 1, j)) * ix2 +
                        (r(i, j + 1) - 2.0 * r(i, j) + r(i, j - 1)) * iy2;
    out.refresh_ghosts();
    return out;
}

FaceField mass_flux(const ScalarField& rho_in, const VelocityField& u_in, FluxMode mode) {
    const ScalarField r = closed(rho_in);
    const VelocityField u = synced(u_in);
    const GridSpec& g = r.grid;
    auto face_value = [mode](double vel, double behind, double ahead) {
        if (mode == FluxMode::centered) return 0.5 * (behind + ahead);
        return vel > 0.0 ? behind : ahead;
    };
    FaceField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = g.xface_begin(); i < g.xface_end(); ++i) {
            const double v = u.x(i, j);
            f.x(i, j) = v * face_value(v, r(i - 1, j), r(i, j));
        }
    for (int j = g.yface_begin(); j < g.yface_end(); ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double v = u.y(i, j);
            f.y(i, j) = v * face_value(v, r(i, j - 1), r(i, j));
        }
    f.sync_periodic();
    return f;
}

ScalarField advect_scalar(const ScalarField& rho, const VelocityField& u, FluxMode mode) {
    return divergence(mass_flux(rho, u, mode));
}

FaceField advect_momentum_flux(const FaceField& flux_in, const VelocityField& u_in) {
    const FaceField f = synced(flux_in);
    const VelocityField u = synced(u_in);
    const GridSpec& g = u.grid;
    FaceField out(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = g.xface_begin(); i < g.xface_end(); ++i) {
            const double c = u.x(i, j);
            const double fe = 0.5 * (f.x(i, j) + f.x(i + 1, j));
            const double fw = 0.5 * (f.x(i - 1, j) + f.x(i, j));
            const double fn = 0.5 * (f.y(i - 1, j + 1) + f.y(i, j + 1));
            const double fs = 0.5 * (f.y(i - 1, j) + f.y(i, j));
            out.x(i, j) = (fe * 0.5 * (c + u.x(i + 1, j)) - fw * 0.5 * (u.x(i - 1, j) + c)) / g.dx +
                          (fn * 0.5 * (c + u.x(i, j + 1)) - fs * 0.5 * (u.x(i, j - 1) + c)) / g.dy;
        }
    for (int j = g.yface_begin(); j < g.yface_end(); ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double c = u.y(i, j);
            const double fn = 0.5 * (f.y(i, j) + f.y(i, j + 1));
            const double fs = 0.5 * (f.y(i, j - 1) + f.y(i, j));
            const double fe = 0.5 * (f.x(i + 1, j - 1) + f.x(i + 1, j));
            const double fw = 0.5 * (f.x(i, j - 1) + f.x(i, j));
            out.y(i, j) = (fn * 0.5 * (c + u.y(i, j + 1)) - fs * 0.5 * (u.y(i, j - 1) + c)) / g.dy +
                          (fe * 0.5 * (c + u.y(i + 1, j)) - fw * 0.5 * (u.y(i - 1, j) + c)) / g.dx;
        }
    out.sync_periodic();
    return out;
}

FaceField advect_momentum(const ScalarField& rho, const VelocityField& u, FluxMode mode) {
    return advect_momentum_flux(mass_flux(rho, u, mode), u);
}

IbpReport ibp_identity(const VelocityField& f_in, const VelocityField& g_in) {
    VelocityField g = synced(g_in);
    const VelocityField f = synced(f_in);
    const GridSpec& grid = g.grid;
    require(grid == f.grid, "ibp_identity: f and g live on different grids");
    require(grid.nx >= 3 && grid.ny >= 3, "ibp_identity: needs at least 3 cells per direction");
    g.pin_normals();
    const double scale = max_abs(g) / std::min(grid.dx, grid.dy);
    const double div_max = max_abs(divergence(g));
    require(div_max <= 1e-9 * scale + 1e-300,
            "ibp_identity: g is not discretely divergence-free (max |div g| = " +
                std::to_string(div_max) + ")");

    IbpReport rep;
    rep.lhs = -face_inner(vector_laplacian(f), g);
    rep.rhs_volume = 2.0 * deformation_inner(f, g);

    // Wall traces come from interior values only (second-order one-sided
    // reconstructions), so the boundary term shares no ghost data with the
    // volume terms and the mismatch measures consistency with the continuum lemma.
    auto deriv = [](double a0, double a1, double a2, double h) { return (-2.0 * a0 + 3.0 * a1 - a2) / h; };
    auto trace = [](double a0, double a1, double a2) { return (15.0 * a0 - 10.0 * a1 + 3.0 * a2) / 8.0; };
    const int nx = grid.nx;
    const int ny = grid.ny;
    const bool per = grid.periodic_x();
    // d/dx of a y-face row at corner column i (one-sided at box walls).
    auto ddx_row = [&](const Array2D& a, int i, int j) {
        if (!per && i == 0) return deriv(a(0, j), a(1, j), a(2, j), grid.dx);
        if (!per && i == nx) return -deriv(a(nx - 1, j), a(nx - 2, j), a(nx - 3, j), grid.dx);
        const int im = (i == 0) ? nx - 1 : i - 1;
        const int ic = (i == nx) ? 0 : i;
        return (a(ic, j) - a(im, j)) / grid.dx;
    };
    auto ddy_col = [&](const Array2D& a, int i, int j) {
        if (j == 0) return deriv(a(i, 0), a(i, 1), a(i, 2), grid.dy);
        if (j == ny) return -deriv(a(i, ny - 1), a(i, ny - 2), a(i, ny - 3), grid.dy);
        return (a(i, j) - a(i, j - 1)) / grid.dy;
    };
    double bnd = 0.0;
    for (int i = 0; i < grid.corner_i_end(); ++i) {
        const double w = per ? 1.0 : ((i == 0 || i == nx) ? 0.5 : 1.0);
        const double s_bottom = 0.5 * (ddy_col(f.x, i, 0) + ddx_row(f.y, i, 0));
        const double s_top = 0.5 * (ddy_col(f.x, i, ny) + ddx_row(f.y, i, ny));
        const double g_bottom = trace(g.x(i, 0), g.x(i, 1), g.x(i, 2));
        const double g_top = trace(g.x(i, ny - 1), g.x(i, ny - 2), g.x(i, ny - 3));
        bnd += w * grid.dx * (-s_bottom * g_bottom + s_top * g_top);
    }
    if (!per) {
        for (int j = 0; j <= ny; ++j) {
            const double w = (j == 0 || j == ny) ? 0.5 : 1.0;
            const double s_left = 0.5 * (ddy_col(f.x, 0, j) + ddx_row(f.y, 0, j));
            const double s_right = 0.5 * (ddy_col(f.x, nx, j) + ddx_row(f.y, nx, j));
            const double g_left = trace(g.y(0, j), g.y(1, j), g.y(2, j));
            const double g_right = trace(g.y(nx - 1, j), g.y(nx - 2, j), g.y(nx - 3, j));
            bnd += w * grid.dy * (-s_left * g_left + s_right * g_right);
        }
    }
    rep.rhs_boundary = -2.0 * bnd;
    rep.mismatch = rep.lhs - rep.rhs_volume - rep.rhs_boundary;
    return rep;
}

VelocityField curl_of_stream(const GridSpec& grid, const ScalarFn& psi) {
    Array2D s(grid.nx + 2, grid.ny + 2);
    for (int j = -1; j <= grid.ny + 1; ++j)
        for (int i = -1; i <= grid.nx + 1; ++i) s(i, j) = psi(grid.xf(i), grid.yf(j));
    VelocityField u(grid);
    for (int j = -1; j <= grid.ny; ++j)
        for (int i = -1; i <= grid.nx + 1; ++i) u.x(i, j) = (s(i, j + 1) - s(i, j)) / grid.dy;
    for (int j = -1; j <= grid.ny + 1; ++j)
        for (int i = -1; i <= grid.nx; ++i) u.y(i, j) = -(s(i + 1, j) - s(i, j)) / grid.dx;
    u.sync_periodic();
    return u;
}

} // namespace navslip
