#pragma once

/// @file grid.hpp
/// @brief Rectangular staggered (MAC) mesh, cell/face field containers and quadrature.
///
/// Layout conventions (0-based, one ghost layer on every array):
///   - cells      (i, j), i in [0, nx), j in [0, ny), centre ((i+1/2)dx, (j+1/2)dy)
///   - x-faces    (i, j), i in [0, nx], j in [0, ny), position (i dx, (j+1/2)dy)
///   - y-faces    (i, j), i in [0, nx), j in [0, ny], position ((i+1/2)dx, j dy)
///   - corners    (i, j), i in [0, nx], j in [0, ny], position (i dx, j dy)
///
/// Two topologies are supported. `box` has walls on all four sides. `channel`
/// is periodic in x with walls at y = 0 and y = Ly; the x-face column i = nx is
/// then the periodic image of column 0 and is kept in sync by refresh_ghosts().

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace navslip {

enum class Topology { box, channel };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& name);

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

enum class FaceAxis { x, y };

/// One boundary-normal face; its value is pinned to zero in every VelocityField.
struct BoundaryFace {
    FaceAxis axis;
    int i;
    int j;
};

struct GridSpec {
    int nx = 0;
    int ny = 0;
    double lx = 0.0;
    double ly = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    Topology topology = Topology::box;

    bool periodic_x() const { return topology == Topology::channel; }
    double cell_area() const { return dx * dy; }

    double xc(int i) const { return (i + 0.5) * dx; }
    double yc(int j) const { return (j + 0.5) * dy; }
    double xf(int i) const { return i * dx; }
    double yf(int j) const { return j * dy; }

    // Unknown (non-pinned) x-faces are i in [xface_begin, xface_end).
    int xface_begin() const { return periodic_x() ? 0 : 1; }
    int xface_end() const { return nx; }
    int yface_begin() const { return 1; }
    int yface_end() const { return ny; }

    // Distinct corner columns: the channel's column nx duplicates column 0.
    int corner_i_end() const { return periodic_x() ? nx : nx + 1; }

    /// Quadrature weight (fraction of a cell area) of corner (i, j).
    double corner_weight(int i, int j) const;

    /// Quadrature weights (fraction of a cell area) of face values, including
    /// the half weight of boundary-normal faces.
    double xface_weight(int i) const;
    double yface_weight(int j) const;

    std::vector<BoundaryFace> boundary_faces() const;

    bool operator==(const GridSpec& other) const = default;
};

/// Validates the counts and lengths and derives the spacings.
GridSpec build_grid(int nx, int ny, double lx, double ly, Topology topology = Topology::box);

/// Dense 2D array with a one-deep ghost layer; (i, j) accepts -1..ni and -1..nj.
class Array2D {
public:
    Array2D() = default;
    Array2D(int ni, int nj, double fill = 0.0)
        : ni_(ni), nj_(nj), stride_(ni + 2), data_(static_cast<std::size_t>((ni + 2) * (nj + 2)), fill) {}

    double& operator()(int i, int j) { return data_[index(i, j)]; }
    double operator()(int i, int j) const { return data_[index(i, j)]; }

    int ni() const { return ni_; }
    int nj() const { return nj_; }
    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>((j + 1) * stride_ + (i + 1));
    }

    int ni_ = 0;
    int nj_ = 0;
    int stride_ = 0;
    std::vector<double> data_;
};

/// Cell-centred scalar with ghosts closed by homogeneous Neumann reflection
/// (periodic in x for the channel topology).
struct ScalarField {
    GridSpec grid;
    Array2D values;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0) : grid(g), values(g.nx, g.ny, fill) {}

    double& operator()(int i, int j) { return values(i, j); }
    double operator()(int i, int j) const { return values(i, j); }

    void refresh_ghosts();
};

/// Face-normal vector components without any boundary constraint.
struct FaceField {
    GridSpec grid;
    Array2D x;  // (nx+1) x ny, normal component on vertical faces
    Array2D y;  // nx x (ny+1), normal component on horizontal faces

    FaceField() = default;
    explicit FaceField(const GridSpec& g) : grid(g), x(g.nx + 1, g.ny), y(g.nx, g.ny + 1) {}

    /// Copies column 0 onto the periodic images (channel only).
    void sync_periodic();
};

/// Velocity on the staggered mesh.  Boundary-normal faces are expected to be
/// exactly zero; the tangential ghosts follow the Navier-slip closure
/// du_t/dn = -2 alpha u_t once refresh_ghosts(alpha) has run.
struct VelocityField : FaceField {
    VelocityField() = default;
    explicit VelocityField(const GridSpec& g) : FaceField(g) {}
    explicit VelocityField(FaceField f) : FaceField(std::move(f)) {}

    void pin_normals();
    bool impermeable() const;
    void refresh_ghosts(double alpha);
};

/// Ghost-to-interior ratio of the Navier-slip closure for wall-normal spacing h.
double slip_ghost_ratio(double alpha, double h);

using ScalarFn = std::function<double(double, double)>;
using VectorFn = std::function<Vec2(double, double)>;

/// Samples at cell centres, ghosts included (then Neumann/periodic closure is NOT applied).
ScalarField sample_scalar(const GridSpec& grid, const ScalarFn& fn);
/// Samples every face including ghosts at their geometric positions.
VelocityField sample_velocity(const GridSpec& grid, const VectorFn& fn);

/// Midpoint quadrature of a cell field.
double integrate(const ScalarField& field);

/// Discrete trace integral of |u|^2 over the walls, using the tangential
/// component at wall midpoints (average of ghost and first interior value).
/// Throws if u violates impermeability.
double boundary_speed_sq_integral(const VelocityField& u);

/// Weighted face inner product sum(a.b dA) including half-weight boundary faces.
double face_inner(const FaceField& a, const FaceField& b);
double face_l2(const FaceField& a);
double cell_l2(const ScalarField& a);
double max_abs(const ScalarField& a);
double max_abs(const FaceField& a);

} // namespace navslip
