#include <doctest.h>

#include <cmath>
#include <random>

#include "navslip/density.hpp"
#include "navslip/diagnostics.hpp"
#include "navslip/error.hpp"
#include "fields.hpp"
#include "oracles.hpp"

using namespace navslip;

TEST_CASE("initial density regularization") {
    GridSpec g = build_grid(64, 64, 1.0, 1.0);
    DensityParams p;
    p.floor = 0.01;
    ScalarField one(g, 1.0);
    ScalarField r = regularize_initial_density(one, p);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) CHECK(r(i, j) == doctest::Approx(1.0).epsilon(1e-15));

    auto disk = [](double x, double y) { return std::hypot(x - 0.5, y - 0.5) < 0.2 ? 0.0 : 1.0; };
    ScalarField rho0 = sample_scalar(g, disk);
    p.floor = 1e-3;
    p.smoothing = false;
    ScalarField clamped = regularize_initial_density(rho0, p);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) CHECK(clamped(i, j) == (rho0(i, j) == 0.0 ? 1e-3 : 1.0));

    auto distance = [&](double floor, bool smoothing) {
        DensityParams q;
        q.floor = floor;
        q.smoothing = smoothing;
        ScalarField reg = regularize_initial_density(rho0, q);
        ScalarField d(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) d(i, j) = reg(i, j) - rho0(i, j);
        return cell_l2(d);
    };
    CHECK(distance(1e-1, false) > distance(1e-2, false));
    CHECK(distance(1e-2, false) > distance(1e-3, false));
    CHECK(distance(1e-3, false) < 1e-3 * std::sqrt(M_PI * 0.04) * 1.2);
    CHECK(distance(1e-1, true) >= distance(1e-2, true));
    CHECK(distance(1e-2, true) >= distance(1e-3, true));

    DensityParams smooth;
    ScalarField s = regularize_initial_density(rho0, smooth);
    CHECK(integrate(s) == doctest::Approx(integrate(clamped)).epsilon(1e-14));
    CHECK(density_bounds(s).first >= smooth.floor);

    ScalarField neg(g, 1.0);
    neg(3, 4) = -0.5;
    CHECK_THROWS_AS(regularize_initial_density(neg, smooth), SolverError);
}

TEST_CASE("density bounds") {
    GridSpec g = build_grid(8, 8, 1.0, 1.0);
    auto b = density_bounds(ScalarField(g, 3.0));
    CHECK(b.first == 3.0);
    CHECK(b.second == 3.0);
    ScalarField r(g, 2.0);
    r(5, 2) = 0.0;
    CHECK(density_bounds(r).first == 0.0);
}

TEST_CASE("density step examples") {
    std::mt19937 rng(31);
    GridSpec g = build_grid(32, 32, 1.0, 1.0);
    DensityParams p;
    p.diffusivity = 1e-3;
    VelocityField u = testfields::random_solenoidal(g, rng);
    ScalarField c = density_step(ScalarField(g, 1.4), u, p, 1e-3);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) CHECK(c(i, j) == doctest::Approx(1.4).epsilon(1e-12));

    SUBCASE("CFL violation names the ratio") {
        try {
            density_step(ScalarField(g, 1.0), u, p, 10.0);
            FAIL("expected a CFL error");
        } catch (const SolverError& e) {
            CHECK(std::string(e.what()).find("CFL") != std::string::npos);
        }
    }
    SUBCASE("non-positive density") {
        ScalarField r(g, 1.0);
        r(2, 2) = 0.0;
        CHECK_THROWS_AS(density_step(r, u, p, 1e-4), SolverError);
    }
}

TEST_CASE("density diffusion matches the heat equation") {
    const double eps = 0.1, t_end = 0.1;
    std::vector<double> err;
    for (int n : {16, 32, 64}) {
        GridSpec g = build_grid(n, n, 1.0, 1.0);
        DensityParams p;
        p.diffusivity = eps;
        ScalarField r = sample_scalar(g, [](double, double y) { return 2.0 + std::cos(M_PI * y); });
        const double h = 1.0 / n;
        const long steps = static_cast<long>(std::ceil(t_end / (2.0 * h * h)));
        const double dt = t_end / steps;
        VelocityField zero(g);
        for (long k = 0; k < steps; ++k) r = density_step(r, zero, p, dt);
        const double decay = std::exp(-eps * M_PI * M_PI * t_end);
        ScalarField d(g);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) d(i, j) = r(i, j) - (2.0 + decay * std::cos(M_PI * g.yc(j)));
        err.push_back(cell_l2(d));
    }
    CHECK(oracle::order(err[0], err[1]) >= 1.8);
    CHECK(oracle::order(err[1], err[2]) >= 1.8);
}

TEST_CASE("transport properties on random admissible data") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 12; ++trial) {
        const Topology topo = trial % 3 == 0 ? Topology::channel : Topology::box;
        GridSpec g = build_grid(16 + 4 * (trial % 4), 20, 1.0, 1.0, topo);
        ScalarField r = testfields::random_density(g, rng, 1.0, 2.0);
        VelocityField u = testfields::random_solenoidal(g, rng);
        DensityParams p;
        p.diffusivity = (trial % 2) ? 0.0 : 1e-3;
        const double umax = max_abs(u);
        const double dt = 0.4 / (umax / g.dx + umax / g.dy + 4 * p.diffusivity / (g.dx * g.dx));
        const double mass0 = integrate(r);
        const auto [lo0, hi0] = density_bounds(r);
        double l2 = lp_norm(r, 2.0), l6 = lp_norm(r, 6.0);
        const double l2_initial_sq = l2 * l2;
        double dissipation = 0.0;
        for (int k = 0; k < 40; ++k) {
            // Accumulate 2 eps dt ||grad rho||^2 at the old level.
            FaceField gr = gradient(r);
            dissipation += 2.0 * p.diffusivity * dt * face_inner(gr, gr);
            r = density_step(r, u, p, dt);
            CHECK(std::abs(integrate(r) - mass0) <= 1e-13 * mass0);
            const auto [lo, hi] = density_bounds(r);
            CHECK(lo >= lo0 - 1e-10);
            CHECK(hi <= hi0 + 1e-10);
            const double n2 = lp_norm(r, 2.0), n6 = lp_norm(r, 6.0);
            CHECK(n2 <= l2 + 1e-10);
            CHECK(n6 <= l6 + 1e-10);
            l2 = n2;
            l6 = n6;
        }
        // L2 budget; the explicit step only adds dissipation (the O(dt) slack).
        CHECK(l2 * l2 + dissipation <= l2_initial_sq * (1.0 + 1e-12) + 1e-12);
    }
}

TEST_CASE("implicit diffusion option conserves mass and bounds") {
    std::mt19937 rng(4);
    GridSpec g = build_grid(24, 24, 1.0, 1.0);
    ScalarField r = testfields::random_density(g, rng, 1.0, 2.0);
    VelocityField u = testfields::random_solenoidal(g, rng);
    DensityParams p;
    p.diffusivity = 0.05;
    p.implicit_diffusion = true;
    const double mass = integrate(r);
    const double dt = 0.4 * g.dx / max_abs(u);
    for (int k = 0; k < 10; ++k) r = density_step(r, u, p, dt);
    CHECK(integrate(r) == doctest::Approx(mass).epsilon(1e-12));
    const auto [lo, hi] = density_bounds(r);
    CHECK(lo >= 1.0 - 1e-10);
    CHECK(hi <= 2.0 + 1e-10);
}
