#include <doctest.h>

#include <cmath>
#include <random>

#include "navslip/diagnostics.hpp"
#include "navslip/error.hpp"
#include "navslip/experiments.hpp"
#include "navslip/scenarios.hpp"
#include "fields.hpp"
#include "oracles.hpp"

using namespace navslip;

TEST_CASE("kinetic energy") {
    GridSpec g = build_grid(16, 16, 1.0, 1.0);
    CHECK(kinetic_energy(ScalarField(g, 2.0), VelocityField(g)) == 0.0);
    std::vector<double> err;
    for (int n : {16, 32, 64}) {
        GridSpec h = build_grid(n, n, 1.0, 1.0);
        VelocityField u = sample_velocity(h, [](double x, double) { return Vec2{std::sin(M_PI * x), 0.0}; });
        u.pin_normals();
        err.push_back(std::abs(kinetic_energy(ScalarField(h, 2.0), u) - 0.5) + 1e-300);
    }
    CHECK(err[2] <= 1e-3);

    std::mt19937 rng(12);
    auto disk = [](double x, double y) { return std::hypot(x - 0.5, y - 0.5) < 0.2 ? 1e-3 : 1.0; };
    VelocityField u = testfields::random_solenoidal(g, rng);
    const double l2 = face_l2(u);
    CHECK(kinetic_energy(sample_scalar(g, disk), u) >= 1e-3 * 0.5 * l2 * l2 * (1.0 - 1e-12));
}

TEST_CASE("Lp norms") {
    GridSpec g = build_grid(10, 10, 1.0, 1.0);
    ScalarField three(g, 3.0);
    CHECK(lp_norm(three, 2.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(lp_norm(three, 6.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(lp_norm(three, INFINITY) == 3.0);
    CHECK(lp_norm(three, 1.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK_THROWS_AS(lp_norm(three, 0.5), SolverError);
    // Monotone in p on a unit-measure domain.
    std::mt19937 rng(2);
    ScalarField r = testfields::random_density(g, rng, 0.1, 4.0);
    CHECK(lp_norm(r, 1.0) <= lp_norm(r, 2.0));
    CHECK(lp_norm(r, 2.0) <= lp_norm(r, 6.0));
    CHECK(lp_norm(r, 6.0) <= lp_norm(r, INFINITY));
}

TEST_CASE("H1 norm") {
    GridSpec g = build_grid(16, 16, 1.0, 1.0);
    CHECK(h1_seminorm_sq(VelocityField(g)) == 0.0);
    const double exact = 0.5 * (1.0 + M_PI * M_PI);
    std::vector<double> err;
    for (int n : {16, 32, 64}) {
        GridSpec h = build_grid(n, n, 1.0, 1.0);
        VelocityField u = sample_velocity(h, [](double x, double) { return Vec2{std::sin(M_PI * x), 0.0}; });
        u.pin_normals();
        u.refresh_ghosts(0.0);
        err.push_back(std::abs(h1_seminorm_sq(u) - exact));
    }
    CHECK(err[2] <= 5e-3);
    CHECK(oracle::order(err[1], err[2]) >= 1.8);

    std::mt19937 rng(6);
    VelocityField u = testfields::random_solenoidal(g, rng);
    u.refresh_ghosts(0.4);
    VelocityField twice = u;
    for (double& v : twice.x.raw()) v *= 2.0;
    for (double& v : twice.y.raw()) v *= 2.0;
    CHECK(h1_seminorm_sq(twice) == 4.0 * h1_seminorm_sq(u));
}

TEST_CASE("Korn ratio") {
    GridSpec g = build_grid(32, 32, 1.0, 1.0);
    ScalarField one(g, 1.0);
    VelocityField strain = sample_velocity(g, [](double x, double y) { return Vec2{x, -y}; });
    const double a = korn_ratio(strain, one);
    CHECK(std::isfinite(a));
    CHECK(a > 0.0);
    VelocityField rot = sample_velocity(g, [](double x, double y) { return Vec2{-(y - 0.5), x - 0.5}; });
    CHECK(deformation_energy(rot) <= 1e-20);
    const double b = korn_ratio(rot, one);
    CHECK(std::isfinite(b));
    CHECK(b > 0.0);
    CHECK(korn_ratio(VelocityField(g), one) == 0.0);
    CHECK_THROWS_AS(korn_ratio(strain, ScalarField(g, 0.0)), SolverError);
    ScalarField neg(g, 1.0);
    neg(0, 0) = -1.0;
    CHECK_THROWS_AS(korn_ratio(strain, neg), SolverError);

    // Mesh independence on smooth tangent fields.
    auto psi = [](double x, double y) { return std::pow(std::sin(M_PI * x) * std::sin(M_PI * y), 2) * (1.0 + x * y); };
    std::vector<double> r;
    for (int n : {32, 64, 128}) {
        GridSpec h = build_grid(n, n, 1.0, 1.0);
        VelocityField u = curl_of_stream(h, psi);
        u.pin_normals();
        u.refresh_ghosts(0.0);
        r.push_back(korn_ratio(u, ScalarField(h, 1.0)));
    }
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    CHECK((*hi - *lo) / *lo < 0.05);
}

TEST_CASE("energy ledger") {
    SUBCASE("inviscid, frictionless, unforced: only kinetic moves") {
        ScenarioSpec spec = scenario("taylor_green_freeslip");
        RunSettings st = spec.defaults;
        st.nx = st.ny = 16;
        st.viscosity = 0.0;
        st.t_end = 0.02;
        RunResult r = run(spec, make_config(spec, st));
        CHECK(energy_residual(r.ledger.front()) == 0.0);
        for (const EnergyLedger& l : r.ledger) {
            CHECK(l.dissipation_acc == 0.0);
            CHECK(l.friction_acc == 0.0);
            CHECK(l.work_acc == 0.0);
        }
    }
    SUBCASE("unforced decay satisfies the inequality and converges in dt") {
        ScenarioSpec spec = scenario("taylor_green_freeslip");
        double res[2];
        for (int level = 0; level < 2; ++level) {
            RunSettings st = spec.defaults;
            st.nx = st.ny = 24;
            st.dt = 2e-3 / (1 << level);
            st.t_end = 0.1;
            RunResult r = run(spec, make_config(spec, st));
            for (const EnergyLedger& l : r.ledger) {
                CHECK(energy_residual(l) <= 1e-8 * l.kinetic_initial);
                CHECK(l.friction_acc == 0.0);
            }
            for (std::size_t k = 1; k < r.ledger.size(); ++k) CHECK(r.ledger[k].kinetic <= r.ledger[k - 1].kinetic);
            res[level] = energy_residual(r.ledger.back());
        }
        CHECK(res[0] / res[1] >= 1.85);
    }
}

TEST_CASE("weak residual") {
    SUBCASE("zero test field") {
        ScenarioSpec spec = scenario("taylor_green_freeslip");
        RunSettings st = spec.defaults;
        st.nx = st.ny = 16;
        st.t_end = 0.02;
        SimConfig c = make_config(spec, st);
        RunOptions o;
        o.keep_trajectory = true;
        RunResult r = run(spec, c, o);
        TestFieldFn zero = [&](double) { return VelocityField(c.grid); };
        CHECK(weak_residual(r.trajectory, zero, c) == 0.0);
    }
    SUBCASE("stationary shear balances exactly") {
        ScenarioSpec spec = scenario("stratified_shear");
        RunSettings st = spec.defaults;
        st.nx = st.ny = 32;
        st.viscosity = 0.0;
        st.diffusivity = 0.0;
        st.t_end = 0.1;
        SimConfig c = make_config(spec, st);
        RunOptions o;
        o.keep_trajectory = true;
        RunResult r = run(spec, c, o);
        auto psi = [](double x, double y) { return std::pow(std::sin(M_PI * y), 2) * (1.0 + 0.3 * std::cos(2.0 * M_PI * x)); };
        TestFieldFn phi = stream_test_field(c.grid, psi, st.t_end, c.friction);
        CHECK(std::abs(weak_residual(r.trajectory, phi, c)) <= 1e-10 * face_l2(phi(0.0)));
    }
    SUBCASE("inadmissible test fields") {
        ScenarioSpec spec = scenario("taylor_green_freeslip");
        RunSettings st = spec.defaults;
        st.nx = st.ny = 12;
        st.t_end = 0.01;
        SimConfig c = make_config(spec, st);
        RunOptions o;
        o.keep_trajectory = true;
        RunResult r = run(spec, c, o);
        TestFieldFn compressible = [&](double t) {
            VelocityField v = sample_velocity(c.grid, [](double x, double) { return Vec2{std::sin(M_PI * x), 0.0}; });
            v.pin_normals();
            for (double& q : v.x.raw()) q *= (0.01 - t);
            return v;
        };
        CHECK_THROWS_AS(weak_residual(r.trajectory, compressible, c), SolverError);
        auto psi = [](double x, double y) { return std::pow(std::sin(M_PI * x) * std::sin(M_PI * y), 2); };
        TestFieldFn persistent = stream_test_field(c.grid, psi, 1.0, 0.0);  // not zero at t = 0.01
        CHECK_THROWS_AS(weak_residual(r.trajectory, persistent, c), SolverError);
    }
    SUBCASE("first-order convergence under joint refinement") {
        ScenarioSpec spec = scenario("taylor_green_freeslip");
        auto psi = [](double x, double y) { return std::pow(std::sin(M_PI * x) * std::sin(M_PI * y), 2) * (1.0 + x * y); };
        std::vector<double> res;
        for (int n : {16, 32}) {
            RunSettings st = spec.defaults;
            st.nx = st.ny = n;
            st.dt = 0.16 / n;
            st.t_end = 0.25;
            SimConfig c = make_config(spec, st);
            RunOptions o;
            o.keep_trajectory = true;
            RunResult r = run(spec, c, o);
            res.push_back(weak_residual(r.trajectory, stream_test_field(c.grid, psi, st.t_end, c.friction), c));
        }
        CHECK(oracle::order(res[0], res[1]) >= 0.9);
    }
}

TEST_CASE("bound bookkeeping") {
    ScenarioSpec spec = scenario("stratified_shear");
    RunSettings st = spec.defaults;
    st.nx = st.ny = 16;
    st.t_end = 0.05;
    SimConfig c = make_config(spec, st);
    FluidState ref = spec.exact(c, 0.0);
    SUBCASE("reference against itself") {
        BoundAccumulator acc(c.viscosity);
        acc.set_initial(ref, ref);
        for (int k = 1; k <= 5; ++k) acc.add(ref, ref, 0.01);
        CHECK(acc.report().lhs == 0.0);
        CHECK(acc.report().data_term == 0.0);
        CHECK(acc.report().forcing_term == 0.0);
        for (double v : acc.lhs_history()) CHECK(v == 0.0);
    }
    SUBCASE("matched data and forcing") {
        FluidState s = scenario_initial_state(spec, c);
        BoundAccumulator acc(c.viscosity);
        acc.set_initial(spec.exact(c, 0.0), s);
        for (long k = 0; k < c.step_count(); ++k) {
            s = step(s, c, c.effective_dt());
            acc.add(s, spec.exact(c, s.t), c.effective_dt());
        }
        const BoundReport& r = acc.report();
        CHECK(r.data_term <= 1e-24);
        CHECK(r.forcing_term == 0.0);
        CHECK(r.visc_term > 0.0);
        CHECK(r.lhs > 0.0);
        CHECK(r.lhs == doctest::Approx(difference_sq(s, spec.exact(c, s.t))).epsilon(1e-12));
    }
    SUBCASE("fitted constant and violations") {
        std::vector<BoundReport> reps(3);
        const double visc[3] = {1e-2, 1e-3, 1e-4};
        for (int k = 0; k < 3; ++k) {
            reps[k].visc_term = visc[k];
            reps[k].lhs = 2.0 * visc[k];
        }
        CHECK(fit_bound_constant(reps) == doctest::Approx(2.0));
        for (const BoundReport& r : reps) CHECK_FALSE(r.violation);
        reps[2].lhs = 3.0 * visc[2];
        fit_bound_constant(reps);
        CHECK(reps[2].violation);
        std::vector<BoundReport> empty(2);
        CHECK_THROWS_AS(fit_bound_constant(empty), SolverError);
    }
}
