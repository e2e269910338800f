#pragma once

/// @file fields.hpp
/// @brief Random admissible inputs for property tests.

#include <cmath>
#include <random>

#include "navslip/operators.hpp"

namespace testfields {

/// Divergence-free, tangent velocity: curl of a random sine series vanishing on the walls.
inline navslip::VelocityField random_solenoidal(const navslip::GridSpec& g, std::mt19937& rng, double amplitude = 1.0) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    double a[3][3];
    for (auto& row : a)
        for (double& v : row) v = d(rng);
    const double lx = g.lx, ly = g.ly;
    const bool periodic = g.periodic_x();
    auto psi = [=](double x, double y) {
        double s = 0.0;
        for (int m = 0; m < 3; ++m)
            for (int n = 0; n < 3; ++n) {
                const double fx = periodic ? std::cos(2.0 * M_PI * m * x / lx + n) : std::sin(M_PI * (m + 1) * x / lx);
                s += a[m][n] * fx * std::sin(M_PI * (n + 1) * y / ly);
            }
        return amplitude * s / (M_PI * 3.0);
    };
    navslip::VelocityField u = navslip::curl_of_stream(g, psi);
    u.pin_normals();
    return u;
}

inline navslip::ScalarField random_density(const navslip::GridSpec& g, std::mt19937& rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    navslip::ScalarField r(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) r(i, j) = d(rng);
    r.refresh_ghosts();
    return r;
}

} // namespace testfields
