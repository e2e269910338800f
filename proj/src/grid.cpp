#include "navslip/grid.hpp"

#include <cmath>

#include "navslip/error.hpp"

namespace navslip {

std::string to_string(Topology t) {
    return t == Topology::box ? "box" : "channel";
}

Topology topology_from_string(const std::string& name) {
    if (name == "box") return Topology::box;
    if (name == "channel") return Topology::channel;
    throw SolverError("unknown topology '" + name + "' (expected box or channel)");
}

GridSpec build_grid(int nx, int ny, double lx, double ly, Topology topology) {
    require(nx >= 2 && ny >= 2, "grid needs at least 2 cells per direction (got " +
                                    std::to_string(nx) + "x" + std::to_string(ny) + ")");
    require(lx > 0.0 && ly > 0.0 && std::isfinite(lx) && std::isfinite(ly),
            "domain side lengths must be positive and finite");
    GridSpec g;
    g.nx = nx;
    g.ny = ny;
    g.lx = lx;
    g.ly = ly;
    g.dx = lx / nx;
    g.dy = ly / ny;
    g.topology = topology;
    return g;
}

double GridSpec::corner_weight(int i, int j) const {
    double wi = 1.0;
    if (!periodic_x() && (i == 0 || i == nx)) wi = 0.5;
    const double wj = (j == 0 || j == ny) ? 0.5 : 1.0;
    return wi * wj;
}

double GridSpec::xface_weight(int i) const {
    if (periodic_x()) return i == nx ? 0.0 : 1.0;
    return (i == 0 || i == nx) ? 0.5 : 1.0;
}

double GridSpec::yface_weight(int j) const {
    return (j == 0 || j == ny) ? 0.5 : 1.0;
}

std::vector<BoundaryFace> GridSpec::boundary_faces() const {
    std::vector<BoundaryFace> faces;
    if (!periodic_x()) {
        for (int j = 0; j < ny; ++j) {
            faces.push_back({FaceAxis::x, 0, j});
            faces.push_back({FaceAxis::x, nx, j});
        }
    }
    for (int i = 0; i < nx; ++i) {
        faces.push_back({FaceAxis::y, i, 0});
        faces.push_back({FaceAxis::y, i, ny});
    }
    return faces;
}

void ScalarField::refresh_ghosts() {
    const int nx = grid.nx;
    const int ny = grid.ny;
    for (int j = 0; j < ny; ++j) {
        if (grid.periodic_x()) {
            values(-1, j) = values(nx - 1, j);
            values(nx, j) = values(0, j);
        } else {
            values(-1, j) = values(0, j);
            values(nx, j) = values(nx - 1, j);
        }
    }
    for (int i = -1; i <= nx; ++i) {
        values(i, -1) = values(i, 0);
        values(i, ny) = values(i, ny - 1);
    }
}

void FaceField::sync_periodic() {
    if (!grid.periodic_x()) return;
    const int nx = grid.nx;
    const int ny = grid.ny;
    for (int j = -1; j <= ny; ++j) {
        x(nx, j) = x(0, j);
        x(-1, j) = x(nx - 1, j);
        x(nx + 1, j) = x(1, j);
    }
    for (int j = -1; j <= ny + 1; ++j) {
        y(-1, j) = y(nx - 1, j);
        y(nx, j) = y(0, j);
    }
}

void VelocityField::pin_normals() {
    const int nx = grid.nx;
    const int ny = grid.ny;
    if (!grid.periodic_x()) {
        for (int j = -1; j <= ny; ++j) {
            x(0, j) = 0.0;
            x(nx, j) = 0.0;
        }
    }
    for (int i = -1; i <= nx; ++i) {
        y(i, 0) = 0.0;
        y(i, ny) = 0.0;
    }
}

bool VelocityField::impermeable() const {
    const int nx = grid.nx;
    const int ny = grid.ny;
    if (!grid.periodic_x()) {
        for (int j = 0; j < ny; ++j)
            if (x(0, j) != 0.0 || x(nx, j) != 0.0) return false;
    }
    for (int i = 0; i < nx; ++i)
        if (y(i, 0) != 0.0 || y(i, ny) != 0.0) return false;
    return true;
}

double slip_ghost_ratio(double alpha, double h) {
    return (1.0 - alpha * h) / (1.0 + alpha * h);
}

void VelocityField::refresh_ghosts(double alpha) {
    require(alpha >= 0.0, "friction coefficient must be non-negative");
    const int nx = grid.nx;
    const int ny = grid.ny;
    const double gy = slip_ghost_ratio(alpha, grid.dy);
    const double gx = slip_ghost_ratio(alpha, grid.dx);

    sync_periodic();
    if (!grid.periodic_x()) {
        // Normal component across the x-walls: odd reflection (never read by the stencils).
        for (int j = 0; j < ny; ++j) {
            x(-1, j) = -x(1, j);
            x(nx + 1, j) = -x(nx - 1, j);
        }
        for (int j = -1; j <= ny + 1; ++j) {
            y(-1, j) = gx * y(0, j);
            y(nx, j) = gx * y(nx - 1, j);
        }
    }
    for (int i = -1; i <= nx + 1; ++i) {
        x(i, -1) = gy * x(i, 0);
        x(i, ny) = gy * x(i, ny - 1);
    }
    for (int i = -1; i <= nx; ++i) {
        y(i, -1) = -y(i, 1);
        y(i, ny + 1) = -y(i, ny - 1);
    }
}

ScalarField sample_scalar(const GridSpec& grid, const ScalarFn& fn) {
    ScalarField f(grid);
    for (int j = -1; j <= grid.ny; ++j)
        for (int i = -1; i <= grid.nx; ++i) f(i, j) = fn(grid.xc(i), grid.yc(j));
    return f;
}

VelocityField sample_velocity(const GridSpec& grid, const VectorFn& fn) {
    VelocityField u(grid);
    for (int j = -1; j <= grid.ny; ++j)
        for (int i = -1; i <= grid.nx + 1; ++i) u.x(i, j) = fn(grid.xf(i), grid.yc(j)).x;
    for (int j = -1; j <= grid.ny + 1; ++j)
        for (int i = -1; i <= grid.nx; ++i) u.y(i, j) = fn(grid.xc(i), grid.yf(j)).y;
    u.sync_periodic();
    return u;
}

double integrate(const ScalarField& field) {
    const GridSpec& g = field.grid;
    double sum = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) sum += field(i, j);
    return sum * g.cell_area();
}

double boundary_speed_sq_integral(const VelocityField& u) {
    require(u.impermeable(), "boundary_speed_sq_integral: velocity violates u.n = 0 on the walls");
    const GridSpec& g = u.grid;
    double sum = 0.0;
    for (int i = 0; i < g.corner_i_end(); ++i) {
        const double w = (g.periodic_x() || (i > 0 && i < g.nx)) ? 1.0 : 0.5;
        const double bottom = 0.5 * (u.x(i, -1) + u.x(i, 0));
        const double top = 0.5 * (u.x(i, g.ny - 1) + u.x(i, g.ny));
        sum += w * (bottom * bottom + top * top) * g.dx;
    }
    if (!g.periodic_x()) {
        for (int j = 0; j <= g.ny; ++j) {
            const double w = (j > 0 && j < g.ny) ? 1.0 : 0.5;
            const double left = 0.5 * (u.y(-1, j) + u.y(0, j));
            const double right = 0.5 * (u.y(g.nx - 1, j) + u.y(g.nx, j));
            sum += w * (left * left + right * right) * g.dy;
        }
    }
    return sum;
}

double face_inner(const FaceField& a, const FaceField& b) {
    const GridSpec& g = a.grid;
    double sum = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) sum += g.xface_weight(i) * a.x(i, j) * b.x(i, j);
    for (int j = 0; j <= g.ny; ++j) {
        const double w = g.yface_weight(j);
        for (int i = 0; i < g.nx; ++i) sum += w * a.y(i, j) * b.y(i, j);
    }
    return sum * g.cell_area();
}

double face_l2(const FaceField& a) {
    return std::sqrt(face_inner(a, a));
}

double cell_l2(const ScalarField& a) {
    const GridSpec& g = a.grid;
    double sum = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) sum += a(i, j) * a(i, j);
    return std::sqrt(sum * g.cell_area());
}

double max_abs(const ScalarField& a) {
    double m = 0.0;
    for (int j = 0; j < a.grid.ny; ++j)
        for (int i = 0; i < a.grid.nx; ++i) m = std::max(m, std::abs(a(i, j)));
    return m;
}

double max_abs(const FaceField& a) {
    const GridSpec& g = a.grid;
    double m = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) m = std::max(m, std::abs(a.x(i, j)));
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) m = std::max(m, std::abs(a.y(i, j)));
    return m;
}

} // namespace navslip
