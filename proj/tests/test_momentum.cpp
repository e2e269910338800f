#include <doctest.h>

#include <cmath>
#include <random>

#include "navslip/diagnostics.hpp"
#include "navslip/error.hpp"
#include "navslip/momentum.hpp"
#include "navslip/scenarios.hpp"
#include "fields.hpp"

using namespace navslip;

namespace {

SimConfig basic_config(const GridSpec& g) {
    SimConfig c;
    c.grid = g;
    c.viscosity = 1e-2;
    c.friction = 0.5;
    c.dt = 2e-3;
    c.t_end = 0.1;
    c.density.diffusivity = g.dx * g.dx;
    return c;
}

InitialVelocity as_velocity(const VelocityField& u) {
    InitialVelocity v;
    v.kind = InitialVelocity::Kind::velocity;
    v.field = u;
    return v;
}

double max_diff(const FaceField& a, const FaceField& b) {
    const GridSpec& g = a.grid;
    double m = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) m = std::max(m, std::abs(a.x(i, j) - b.x(i, j)));
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) m = std::max(m, std::abs(a.y(i, j) - b.y(i, j)));
    return m;
}

} // namespace

TEST_CASE("initial state") {
    std::mt19937 rng(9);
    GridSpec g = build_grid(24, 24, 1.0, 1.0);
    SimConfig c = basic_config(g);
    VelocityField u0 = testfields::random_solenoidal(g, rng);
    FluidState s = initial_state(ScalarField(g, 1.0), as_velocity(u0), c);
    CHECK(max_diff(s.u, u0) <= 1e-12 * max_abs(u0));
    CHECK(std::abs(integrate(s.pressure)) <= 1e-12);

    FluidState z = initial_state(ScalarField(g, 1.0), as_velocity(VelocityField(g)), c);
    CHECK(max_abs(z.u) == 0.0);

    auto disk = [](double x, double y) { return std::hypot(x - 0.5, y - 0.5) < 0.2 ? 0.0 : 1.0; };
    InitialVelocity mom;
    mom.kind = InitialVelocity::Kind::momentum;
    mom.field = u0;  // nonzero inside the empty disk
    CHECK_THROWS_AS(initial_state(sample_scalar(g, disk), mom, c), SolverError);
}

TEST_CASE("pressure projection") {
    GridSpec g = build_grid(32, 32, 1.0, 1.0);
    SimConfig c = basic_config(g);
    SUBCASE("divergence-free input is left alone") {
        std::mt19937 rng(1);
        VelocityField u = testfields::random_solenoidal(g, rng);
        ProjectionResult p = pressure_project(u, ScalarField(g, 1.0), c.dt, c);
        CHECK(max_diff(p.u, u) <= 1e-12 * max_abs(u));
        CHECK(max_abs(p.pressure) <= 1e-10);
    }
    SUBCASE("pure gradient is annihilated") {
        VelocityField u = sample_velocity(g, [](double x, double) { return Vec2{-M_PI * std::sin(M_PI * x), 0.0}; });
        u.pin_normals();
        ProjectionResult p = pressure_project(u, ScalarField(g, 1.0), 1.0, c);
        CHECK(max_abs(p.u) <= 10.0 * c.poisson_tol * max_abs(u));
    }
    SUBCASE("two-layer density") {
        std::mt19937 rng(2);
        ScalarField rho = sample_scalar(g, [](double, double y) { return y < 0.5 ? 1.0 : 10.0; });
        VelocityField u = testfields::random_solenoidal(g, rng);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (double& v : u.x.raw()) v += 0.3 * d(rng);
        for (double& v : u.y.raw()) v += 0.3 * d(rng);
        u.pin_normals();
        ProjectionResult p = pressure_project(u, rho, c.dt, c);
        CHECK(p.u.impermeable());
        CHECK(cell_l2(divergence(p.u)) <= 10.0 * c.poisson_tol * face_l2(u));
        CHECK(std::abs(integrate(p.pressure)) <= 1e-10 * max_abs(p.pressure));
    }
    SUBCASE("permeable input is rejected") {
        VelocityField u = sample_velocity(g, [](double, double) { return Vec2{1.0, 0.0}; });
        CHECK_THROWS_AS(pressure_project(u, ScalarField(g, 1.0), c.dt, c), SolverError);
    }
}

TEST_CASE("predictor and step fixed points") {
    std::mt19937 rng(3);
    GridSpec g = build_grid(20, 20, 1.0, 1.0);
    SimConfig c = basic_config(g);
    ScalarField rho = testfields::random_density(g, rng, 1.0, 2.0);
    FluidState s = initial_state(rho, as_velocity(VelocityField(g)), c);
    DensityUpdate d = density_advance(s.rho, s.u, c.density, c.dt);
    CHECK(max_abs(momentum_predictor(s, d, c, c.dt)) == 0.0);

    // No flow and no forcing: density only diffuses, velocity stays zero.
    c.density.diffusivity = 0.0;
    FluidState s0 = initial_state(rho, as_velocity(VelocityField(g)), c);
    FluidState s1 = step(s0, c);
    CHECK(s1.t == doctest::Approx(c.dt));
    CHECK(max_abs(s1.u) == 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) CHECK(s1.rho(i, j) == s0.rho(i, j));
}

TEST_CASE("stationary stratified shear without viscosity") {
    ScenarioSpec spec = scenario("stratified_shear");
    RunSettings st = spec.defaults;
    st.nx = st.ny = 32;
    st.viscosity = 0.0;
    st.diffusivity = 0.0;
    st.t_end = 0.05;
    SimConfig c = make_config(spec, st);
    FluidState s = scenario_initial_state(spec, c);
    const FluidState s0 = s;
    EnergyLedger ledger = ledger_start(s);
    for (long k = 0; k < c.step_count(); ++k) {
        s = step(s, c, c.effective_dt());
        ledger = ledger_update(ledger, s, c, c.effective_dt());
    }
    CHECK(max_diff(s.u, s0.u) <= 1e-10);
    CHECK(std::abs(energy_residual(ledger)) <= 1e-12 * ledger.kinetic_initial);
    CHECK(ledger.dissipation_acc == 0.0);
}

TEST_CASE("step invariants on a forced variable-density run") {
    ScenarioSpec spec = scenario("lid_forced");
    RunSettings st = spec.defaults;
    st.nx = st.ny = 24;
    st.t_end = 0.04;
    SimConfig c = make_config(spec, st);
    FluidState s = scenario_initial_state(spec, c);
    for (long k = 0; k < c.step_count(); ++k) {
        const FluidState prev = s;
        s = step(s, c, c.effective_dt());
        CHECK(s.u.impermeable());
        CHECK(cell_l2(divergence(s.u)) <= 10.0 * c.poisson_tol * face_l2(s.u));
        CHECK(std::abs(integrate(s.pressure)) <= 1e-9 * (max_abs(s.pressure) + 1e-300));
        CHECK(density_bounds(s.rho).first > 0.0);
    }
}

TEST_CASE("mirror symmetry across the vertical midline") {
    GridSpec g = build_grid(24, 20, 1.0, 1.0);
    SimConfig c = basic_config(g);
    c.poisson_tol = 1e-14;
    c.viscous_tol = 1e-14;
    c.t_end = 0.03;
    auto rho_fn = [](double x, double y) { return 1.5 + 0.4 * std::cos(2.0 * x + 0.3) * std::sin(M_PI * y) + 0.1 * x; };
    auto psi = [](double x, double y) { return std::pow(std::sin(M_PI * x) * std::sin(M_PI * y), 2) * (1.0 + 0.7 * x); };
    auto force = [](double x, double y, double t) { return Vec2{y * y * (1.0 + x) * (1.0 + t), 0.3 * x * x}; };
    auto mirror_force = [&](double x, double y, double t) { Vec2 f = force(1.0 - x, y, t); return Vec2{-f.x, f.y}; };

    VelocityField u = curl_of_stream(g, psi);
    u.pin_normals();
    VelocityField m(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) m.x(i, j) = -u.x(g.nx - i, j);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) m.y(i, j) = u.y(g.nx - 1 - i, j);

    SimConfig ca = c, cb = c;
    ca.forcing = force;
    cb.forcing = mirror_force;
    FluidState a = initial_state(sample_scalar(g, rho_fn), as_velocity(u), ca);
    FluidState b = initial_state(sample_scalar(g, [&](double x, double y) { return rho_fn(1.0 - x, y); }), as_velocity(m), cb);
    for (long k = 0; k < c.step_count(); ++k) {
        a = step(a, ca, c.effective_dt());
        b = step(b, cb, c.effective_dt());
    }
    double du = 0.0, dr = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) du = std::max(du, std::abs(a.u.x(i, j) + b.u.x(g.nx - i, j)));
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) du = std::max(du, std::abs(a.u.y(i, j) - b.u.y(g.nx - 1 - i, j)));
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) dr = std::max(dr, std::abs(a.rho(i, j) - b.rho(g.nx - 1 - i, j)));
    CHECK(du <= 1e-12);
    CHECK(dr <= 1e-12);
}

TEST_CASE("configuration validation") {
    GridSpec g = build_grid(8, 8, 1.0, 1.0);
    SimConfig c = basic_config(g);
    CHECK_NOTHROW(c.validate());
    SimConfig bad = c;
    bad.viscosity = -1.0;
    CHECK_THROWS_AS(bad.validate(), SolverError);
    bad = c;
    bad.dt = 0.0;
    CHECK_THROWS_AS(bad.validate(), SolverError);
    bad = c;
    bad.poisson_tol = 1e-3;
    CHECK_THROWS_AS(bad.validate(), SolverError);
    c.t_end = 0.1;
    c.dt = 0.03;
    CHECK(c.step_count() == 4);
    CHECK(c.effective_dt() * 4 == doctest::Approx(0.1));
}
