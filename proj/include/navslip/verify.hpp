#pragma once

/// @file verify.hpp
/// @brief Verification studies behind `navslip verify` and the acceptance run.
///
/// Each `measure_*` function only produces numbers; `evaluate_*` turns them
/// into a pass/fail verdict with the pinned tolerances.

#include <array>
#include <string>
#include <vector>

#include "navslip/experiments.hpp"

namespace navslip {

struct CheckResult {
    int id = 0;                 // acceptance criterion, 0 for supplementary checks
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double budget_seconds = 0.0;  // 0: unbudgeted
};

struct MassRun {
    std::string scenario;
    long steps = 0;
    double drift = 0.0;
    double seconds = 0.0;
};

/// Every shipped scenario on an n x n mesh for `steps` steps at its default dt.
std::vector<MassRun> measure_mass_conservation(int n = 64, long steps = 500);

struct DensityRangeRun {
    std::string scenario;
    double rho0_min = 0.0;
    double rho0_max = 0.0;
    double rho_min = 0.0;
    double rho_max = 0.0;
    double lp6_max_increase = 0.0;  // largest step-to-step growth of ||rho||_6
    double seconds = 0.0;
};

/// stratified_shear and lid_forced in upwind mode up to t_end, tracking the
/// density range and ||rho||_6 after every step.
std::vector<DensityRangeRun> measure_density_range(int n = 64, double t_end = 1.0);

struct EnergyRefinement {
    double dt = 0.0;
    double residual_coarse = 0.0;  // final summed residual at dt
    double residual_fine = 0.0;    // final summed residual at dt/2
    double max_residual = 0.0;     // over every step of both runs
    double kinetic_initial = 0.0;
    double seconds = 0.0;
};

EnergyRefinement measure_energy_refinement();

struct IbpStudy {
    std::vector<int> meshes;
    std::vector<double> mismatch;
    RateFit fit;  // |mismatch| against h; slope is the order
    double seconds = 0.0;
};

IbpStudy measure_slip_ibp(const std::vector<int>& meshes = {16, 32, 64, 128});

struct NavierAccuracy {
    double couette_rate = 0.0;  // fitted decay rate of the projected mode
    double couette_viscosity = 0.0;
    double couette_friction = 0.0;
    double couette_density = 0.0;
    double couette_height = 0.0;
    std::vector<int> tg_meshes;
    std::vector<double> tg_error;
    double seconds = 0.0;
};

NavierAccuracy measure_navier_accuracy();

struct InviscidStudy {
    SweepResult sweep;
    double seconds = 0.0;
};

InviscidStudy measure_inviscid_limit(bool deterministic = false, const std::string& out_dir = "");

struct WeakResidualStudy {
    std::vector<int> meshes;
    std::vector<double> dt;
    std::vector<std::array<double, 3>> residual;  // one column per test field
    double seconds = 0.0;
};

WeakResidualStudy measure_weak_residual();

struct ProjectionStudy {
    int trials = 0;
    double poisson_tol = 0.0;
    double worst_gradient_ratio = 0.0;    // ||P(grad)|| / ||grad||
    double worst_divergence_ratio = 0.0;  // ||D P u*|| / ||u*||
    double seconds = 0.0;
};

ProjectionStudy measure_projection(int trials = 100, unsigned seed = 20240601u);

struct KornStudy {
    std::vector<int> meshes;
    std::vector<std::vector<double>> ratios;  // [field][mesh]
    double worst_spread = 0.0;                // max relative (max - min) / min
    double seconds = 0.0;
};

KornStudy measure_korn_stability(const std::vector<int>& meshes = {32, 64, 128});

struct CompensationStudy {
    double residual_with = 0.0;  // max |residual + backward-Euler dissipation| / kinetic_initial
    double residual_without = 0.0;
    double seconds = 0.0;
};

CompensationStudy measure_eps_compensation();

CheckResult evaluate_mass_conservation(const std::vector<MassRun>& runs);
CheckResult evaluate_maximum_principle(const std::vector<DensityRangeRun>& runs);
CheckResult evaluate_lp_monotonicity(const std::vector<DensityRangeRun>& runs);
CheckResult evaluate_energy_identity(const EnergyRefinement& e);
CheckResult evaluate_slip_ibp(const IbpStudy& s);
CheckResult evaluate_navier_accuracy(const NavierAccuracy& a);
CheckResult evaluate_inviscid_limit(const InviscidStudy& s);
CheckResult evaluate_weak_residual(const WeakResidualStudy& s);
CheckResult evaluate_projection(const ProjectionStudy& p);
CheckResult evaluate_korn_stability(const KornStudy& k);
CheckResult evaluate_eps_compensation(const CompensationStudy& c);

/// Suites: "identities" (1, 2, 3, 5, 9, Korn), "energy" (4, 8, compensation),
/// "rates" (6, 7) or "all".
std::vector<CheckResult> run_suite(const std::string& suite, bool deterministic = false);

/// Base-2 observed orders between consecutive refinements.
std::vector<double> observed_orders(const std::vector<double>& errors);

} // namespace navslip
