/// @file acceptance.cpp
/// @brief Acceptance run: one PASS/FAIL line per criterion, pinned tolerances
///        and runtime budgets. `navslip_acceptance [N ...]` runs a subset.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "navslip/verify.hpp"
#include "oracles.hpp"

using namespace navslip;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[violated] ";
        }
        detail << what << "; ";
    }
};

std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

std::string precise(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.15g", v);
    return b;
}

Verdict mass_conservation() {
    Verdict v;
    for (const MassRun& r : measure_mass_conservation(64, 500)) {
        v.require(r.steps == 500, r.scenario + " steps " + std::to_string(r.steps));
        v.require(r.drift <= 1e-12, r.scenario + " drift " + num(r.drift) + " <= 1e-12");
        v.require(r.seconds <= 10.0, r.scenario + " " + num(r.seconds) + " s <= 10 s");
    }
    return v;
}

Verdict density_range(bool lp) {
    Verdict v;
    double total = 0.0;
    for (const DensityRangeRun& r : measure_density_range(64, 1.0)) {
        total += r.seconds;
        v.require(r.rho0_min >= 1.0 && r.rho0_max <= 2.0, r.scenario + " initial range within [1, 2]");
        if (lp) {
            v.require(r.lp6_max_increase <= 1e-10, r.scenario + " max growth of ||rho||_6 " + num(r.lp6_max_increase) + " <= 1e-10");
        } else {
            v.require(r.rho_min >= 1.0 - 1e-10 && r.rho_max <= 2.0 + 1e-10,
                      r.scenario + " range [" + precise(r.rho_min) + ", " + precise(r.rho_max) + "] within [1 - 1e-10, 2 + 1e-10]");
        }
    }
    v.require(total <= 30.0, "runtime " + num(total) + " s <= 30 s");
    return v;
}

Verdict energy_identity() {
    Verdict v;
    const EnergyRefinement e = measure_energy_refinement();
    const double ratio = e.residual_coarse / e.residual_fine;
    v.require(ratio >= 1.85, "residual ratio " + num(ratio) + " (" + num(e.residual_coarse) + " / " + num(e.residual_fine) + ") >= 1.85");
    v.require(e.max_residual <= 1e-8 * e.kinetic_initial,
              "max residual " + num(e.max_residual) + " <= 1e-8 K0 = " + num(1e-8 * e.kinetic_initial));
    v.require(e.seconds <= 60.0, "runtime " + num(e.seconds) + " s <= 60 s");
    return v;
}

Verdict slip_ibp() {
    Verdict v;
    const IbpStudy s = measure_slip_ibp({16, 32, 64, 128});
    std::vector<double> h, m;
    for (std::size_t k = 0; k < s.meshes.size(); ++k) {
        h.push_back(1.0 / s.meshes[k]);
        m.push_back(std::abs(s.mismatch[k]));
    }
    double r2 = 0.0;
    const double order = oracle::loglog_slope(h, m, &r2);
    v.require(order >= 1.8, "mismatch order " + num(order) + " >= 1.8");
    v.require(r2 >= 0.99, "r2 " + num(r2) + " >= 0.99");
    v.require(s.seconds <= 10.0, "runtime " + num(s.seconds) + " s <= 10 s");
    return v;
}

Verdict navier_accuracy() {
    Verdict v;
    const NavierAccuracy a = measure_navier_accuracy();
    // The channel mode cos(k (y/H - 1/2)) with k from the unit-interval Robin
    // problem at friction alpha H decays at nu k^2 / (H^2 rho).
    const double k = oracle::robin_wavenumber_shooting(a.couette_friction * a.couette_height);
    const double expected = a.couette_viscosity * k * k / (a.couette_height * a.couette_height * a.couette_density);
    const double rel = std::abs(a.couette_rate / expected - 1.0);
    v.require(a.couette_friction == 0.5 && a.couette_viscosity == 1e-2, "couette alpha 0.5, nu 1e-2");
    v.require(rel <= 0.01, "couette rate " + num(a.couette_rate) + " vs " + num(expected) + ", rel " + num(rel) + " <= 0.01");
    for (std::size_t q = 1; q < a.tg_error.size(); ++q) {
        const double o = oracle::order(a.tg_error[q - 1], a.tg_error[q]);
        v.require(o >= 1.8, "taylor-green order " + std::to_string(a.tg_meshes[q - 1]) + "->" +
                                std::to_string(a.tg_meshes[q]) + " " + num(o) + " >= 1.8");
    }
    v.require(a.seconds <= 120.0, "runtime " + num(a.seconds) + " s <= 120 s");
    return v;
}

Verdict inviscid_limit() {
    Verdict v;
    const InviscidStudy s = measure_inviscid_limit(false);
    const SweepResult& r = s.sweep;
    std::vector<double> nu, err;
    for (const SweepRow& row : r.rows) {
        nu.push_back(row.nu);
        err.push_back(row.err_u_l2);
    }
    v.require(nu == std::vector<double>{1e-2, 3e-3, 1e-3, 3e-4, 1e-4}, "viscosities 1e-2 .. 1e-4");
    double r2 = 0.0;
    const double slope = oracle::loglog_slope(nu, err, &r2);
    v.require(slope >= 0.45 && slope <= 0.60, "slope of ||u - u_nu|| vs nu " + num(slope) + " in [0.45, 0.60]");
    v.require(r2 >= 0.98, "r2 " + num(r2) + " >= 0.98");
    // Constant through the origin fitted here, independently of the library.
    double sxy = 0.0, sxx = 0.0;
    for (const BoundReport& b : r.reports) {
        const double rhs = b.data_term + b.visc_term + b.forcing_term;
        sxy += b.lhs * rhs;
        sxx += rhs * rhs;
    }
    const double c = sxy / sxx;
    double worst = 0.0;
    for (const BoundReport& b : r.reports) worst = std::max(worst, b.lhs / (c * (b.data_term + b.visc_term + b.forcing_term)));
    v.require(worst <= 1.1, "worst lhs / (C rhs) " + num(worst) + " <= 1.1 (C = " + num(c) + ")");
    v.require(s.seconds <= 900.0, "runtime " + num(s.seconds) + " s <= 900 s");
    return v;
}

Verdict weak_form_residual() {
    Verdict v;
    const WeakResidualStudy w = measure_weak_residual();
    for (int f = 0; f < 3; ++f)
        for (std::size_t q = 1; q < w.residual.size(); ++q) {
            const double o = oracle::order(w.residual[q - 1][f], w.residual[q][f]);
            v.require(o >= 0.9, "field " + std::to_string(f) + " order " + std::to_string(w.meshes[q - 1]) + "->" +
                                    std::to_string(w.meshes[q]) + " " + num(o) + " >= 0.9");
        }
    return v;
}

Verdict projection() {
    Verdict v;
    const ProjectionStudy p = measure_projection(100, 20240601u);
    const double cap = 10.0 * p.poisson_tol;
    v.require(p.trials == 100, "100 randomized trials");
    v.require(p.worst_gradient_ratio <= cap, "pure gradient residue " + num(p.worst_gradient_ratio) + " <= " + num(cap));
    v.require(p.worst_divergence_ratio <= cap, "divergence after projection " + num(p.worst_divergence_ratio) + " <= " + num(cap));
    return v;
}

} // namespace

int main(int argc, char** argv) {
    const std::map<int, std::pair<std::string, std::function<Verdict()>>> criteria = {
        {1, {"mass conservation", mass_conservation}},
        {2, {"maximum principle", [] { return density_range(false); }}},
        {3, {"Lp monotonicity", [] { return density_range(true); }}},
        {4, {"discrete energy identity", energy_identity}},
        {5, {"slip integration by parts", slip_ibp}},
        {6, {"Navier-slip solution accuracy", navier_accuracy}},
        {7, {"inviscid limit", inviscid_limit}},
        {8, {"weak-formulation residual", weak_form_residual}},
        {9, {"projection correctness", projection}},
    };
    std::vector<int> selected;
    for (int k = 1; k < argc; ++k) selected.push_back(std::atoi(argv[k]));
    if (selected.empty())
        for (const auto& c : criteria) selected.push_back(c.first);

    int failures = 0;
    for (int id : selected) {
        auto it = criteria.find(id);
        if (it == criteria.end()) {
            std::printf("FAIL [%d] unknown criterion\n", id);
            ++failures;
            continue;
        }
        Verdict v;
        try {
            v = it->second.second();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail << "exception: " << e.what();
        }
        if (!v.pass) ++failures;
        std::printf("%s [%d] %s: %s\n", v.pass ? "PASS" : "FAIL", id, it->second.first.c_str(), v.detail.str().c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
