#include "navslip/scenarios.hpp"

#include <cmath>

#include "navslip/error.hpp"

namespace navslip {

namespace {

constexpr double kPi = M_PI;

FluidState sampled_state(const SimConfig& cfg, double t, const ScalarFn& rho, const VectorFn& u) {
    FluidState s;
    s.t = t;
    s.rho = sample_scalar(cfg.grid, rho);
    s.u = sample_velocity(cfg.grid, u);
    s.u.pin_normals();
    s.pressure = ScalarField(cfg.grid);
    return s;
}

ScenarioSpec couette_robin() {
    ScenarioSpec s;
    s.name = "couette_robin";
    s.summary = "constant density, periodic channel, decaying Robin shear mode";
    s.topology = Topology::channel;
    const double rho_bar = 2.0;
    s.rho0 = [rho_bar](double, double) { return rho_bar; };
    s.velocity0 = [](double, double y, const SimConfig& c) {
        const double k = robin_wavenumber(c.friction * c.grid.ly);
        return Vec2{std::cos(k * (y / c.grid.ly - 0.5)), 0.0};
    };
    s.exact = [rho_bar](const SimConfig& c, double t) {
        const double k = robin_wavenumber(c.friction * c.grid.ly);
        const double ly = c.grid.ly;
        const double decay = std::exp(-c.viscosity * k * k / (ly * ly) * t / rho_bar);
        return sampled_state(
            c, t, [rho_bar](double, double) { return rho_bar; },
            [k, ly, decay](double, double y) { return Vec2{decay * std::cos(k * (y / ly - 0.5)), 0.0}; });
    };
    RunSettings& d = s.defaults;
    d.nx = 4;
    d.ny = 128;
    d.lx = 4.0 / 128.0;
    d.ly = 1.0;
    d.viscosity = 1e-2;
    d.friction = 0.5;
    d.diffusivity = 0.0;
    d.dt = 5e-3;
    d.t_end = 10.0;
    return s;
}

Vec2 taylor_green_field(double x, double y) {
    return {std::sin(kPi * x) * std::cos(kPi * y), -std::cos(kPi * x) * std::sin(kPi * y)};
}

ScenarioSpec taylor_green_freeslip() {
    ScenarioSpec s;
    s.name = "taylor_green_freeslip";
    s.summary = "unit density decaying vortex, free slip on the unit box";
    s.topology = Topology::box;
    s.rho0 = [](double, double) { return 1.0; };
    s.velocity0 = [](double x, double y, const SimConfig&) { return taylor_green_field(x, y); };
    s.exact = [](const SimConfig& c, double t) {
        const double decay = std::exp(-2.0 * kPi * kPi * c.viscosity * t);
        return sampled_state(
            c, t, [](double, double) { return 1.0; },
            [decay](double x, double y) {
                const Vec2 v = taylor_green_field(x, y);
                return Vec2{decay * v.x, decay * v.y};
            });
    };
    s.friction_max = 0.0;
    RunSettings& d = s.defaults;
    d.viscosity = 1e-2;
    d.friction = 0.0;
    d.diffusivity = 0.0;
    d.dt = 5e-4;
    d.t_end = 0.25;
    return s;
}

ScenarioSpec stratified_shear() {
    ScenarioSpec s;
    s.name = "stratified_shear";
    s.summary = "layered density and shear flow in a periodic channel (stationary inviscid solution)";
    s.topology = Topology::channel;
    auto rho = [](double, double y) { return 1.5 - 0.5 * std::cos(kPi * y); };
    auto shear = [](double, double y) { return Vec2{std::cos(kPi * y) + 0.5 * std::sin(2.0 * kPi * y), 0.0}; };
    s.rho0 = rho;
    s.velocity0 = [shear](double x, double y, const SimConfig&) { return shear(x, y); };
    s.exact = [rho, shear](const SimConfig& c, double t) { return sampled_state(c, t, rho, shear); };
    RunSettings& d = s.defaults;
    d.nx = 128;
    d.ny = 128;
    d.viscosity = 1e-3;
    d.friction = 0.5;
    d.diffusivity = 0.0;
    d.smoothing = false;
    d.dt = 2.5e-3;
    d.t_end = 0.5;
    return s;
}

ScenarioSpec vacuum_floor() {
    ScenarioSpec s;
    s.name = "vacuum_floor";
    s.summary = "unit density with an empty disk, regularized by the density floor";
    s.topology = Topology::box;
    auto rho = [](double x, double y) {
        const double r2 = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5);
        return r2 < 0.04 ? 0.0 : 1.0;
    };
    s.rho0 = rho;
    s.velocity_kind = InitialVelocity::Kind::momentum;
    s.velocity0 = [rho](double x, double y, const SimConfig&) {
        // rho0 times the curl of 0.05 sin^2(pi x) sin^2(pi y)
        const double a = 0.05 * kPi;
        const double ux = a * std::pow(std::sin(kPi * x), 2) * std::sin(2.0 * kPi * y);
        const double uy = -a * std::sin(2.0 * kPi * x) * std::pow(std::sin(kPi * y), 2);
        const double r = rho(x, y);
        return Vec2{r * ux, r * uy};
    };
    RunSettings& d = s.defaults;
    d.viscosity = 1e-2;
    d.friction = 0.5;
    d.density_floor = 1e-3;
    d.dt = 1e-3;
    d.t_end = 0.5;
    return s;
}

ScenarioSpec lid_forced() {
    ScenarioSpec s;
    s.name = "lid_forced";
    s.summary = "variable density box flow driven by a smooth shear force near the top wall";
    s.topology = Topology::box;
    s.rho0 = [](double x, double y) { return 1.5 + 0.5 * std::cos(kPi * x) * std::cos(kPi * y); };
    s.velocity0 = [](double x, double y, const SimConfig&) {
        const double a = 0.1 * kPi;
        return Vec2{a * std::pow(std::sin(kPi * x), 2) * std::sin(2.0 * kPi * y),
                    -a * std::sin(2.0 * kPi * x) * std::pow(std::sin(kPi * y), 2)};
    };
    s.forcing = [](double, double y, double t) {
        return Vec2{y * y * y * (1.0 + 0.5 * std::sin(2.0 * kPi * t)), 0.0};
    };
    RunSettings& d = s.defaults;
    d.viscosity = 2e-2;
    d.friction = 0.25;
    d.dt = 2e-3;
    d.t_end = 0.5;
    return s;
}

} // namespace

std::vector<std::string> scenario_names() {
    return {"couette_robin", "taylor_green_freeslip", "stratified_shear", "vacuum_floor", "lid_forced"};
}

ScenarioSpec scenario(const std::string& name) {
    if (name == "couette_robin") return couette_robin();
    if (name == "taylor_green_freeslip") return taylor_green_freeslip();
    if (name == "stratified_shear") return stratified_shear();
    if (name == "vacuum_floor") return vacuum_floor();
    if (name == "lid_forced") return lid_forced();
    std::string list;
    for (const auto& n : scenario_names()) list += (list.empty() ? "" : ", ") + n;
    throw SolverError("unknown scenario '" + name + "'; available: " + list);
}

SimConfig make_config(const ScenarioSpec& spec, const RunSettings& st) {
    require(st.viscosity >= spec.viscosity_min && st.viscosity <= spec.viscosity_max,
            "viscosity " + std::to_string(st.viscosity) + " is outside the range supported by " + spec.name);
    require(st.friction >= spec.friction_min && st.friction <= spec.friction_max,
            "friction " + std::to_string(st.friction) + " is outside the range supported by " + spec.name);
    SimConfig c;
    c.grid = build_grid(st.nx, st.ny, st.lx, st.ly, spec.topology);
    c.viscosity = st.viscosity;
    c.friction = st.friction;
    const double h = std::min(c.grid.dx, c.grid.dy);
    c.density.diffusivity = st.diffusivity ? *st.diffusivity : h * h;
    c.density.floor = st.density_floor;
    c.density.flux_mode = st.flux_mode;
    c.density.implicit_diffusion = st.implicit_diffusion;
    c.density.smoothing = st.smoothing;
    c.dt = st.dt;
    c.t_end = st.t_end;
    c.poisson_tol = st.poisson_tol;
    c.viscous_tol = st.viscous_tol;
    c.max_iterations = st.max_iterations;
    c.eps_compensation = st.eps_compensation;
    c.forcing = spec.forcing;
    c.validate();
    return c;
}

FluidState scenario_initial_state(const ScenarioSpec& spec, const SimConfig& config) {
    const GridSpec& g = config.grid;
    ScalarField rho0(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) rho0(i, j) = spec.rho0(g.xc(i), g.yc(j));
    rho0.refresh_ghosts();
    InitialVelocity v0;
    v0.kind = spec.velocity_kind;
    const InitialFieldFn& field = spec.velocity0;
    VelocityField sampled = sample_velocity(g, [&](double x, double y) { return field(x, y, config); });
    sampled.pin_normals();
    v0.field = sampled;
    return initial_state(rho0, v0, config);
}

double robin_wavenumber(double alpha) {
    require(alpha >= 0.0, "robin_wavenumber: friction must be non-negative");
    if (alpha == 0.0) return 0.0;
    double lo = 0.0;
    double hi = kPi;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid * std::tan(0.5 * mid) - 2.0 * alpha > 0.0) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace navslip
