#pragma once

/// @file diagnostics.hpp
/// @brief Energy budget, norms, Korn ratio, weak-form residual and the
///        viscous-limit bound bookkeeping.

#include <functional>
#include <vector>

#include "navslip/grid.hpp"
#include "navslip/momentum.hpp"

namespace navslip {

/// 1/2 sum(rho_f |u|^2 dA) over faces with face-averaged density. This is the
/// quadratic form the momentum mass matrix induces.
double kinetic_energy(const ScalarField& rho, const VelocityField& u);

/// sum(rho_f f.u dA) over faces.
double power(const ScalarField& rho, const FaceField& f, const VelocityField& u);

struct EnergyLedger {
    double t = 0.0;
    double kinetic = 0.0;
    double dissipation_acc = 0.0;
    double friction_acc = 0.0;
    double work_acc = 0.0;
    double kinetic_initial = 0.0;
};

EnergyLedger ledger_start(const FluidState& state);

/// Advances the accumulators with right-endpoint quadrature in time: `state`
/// is the state reached after a step of length dt.
EnergyLedger ledger_update(const EnergyLedger& ledger, const FluidState& state,
                           const SimConfig& config, double dt);

/// kinetic + dissipation_acc + friction_acc - kinetic_initial - work_acc.
double energy_residual(const EnergyLedger& ledger);

/// p in {1, 2, 6, ...} (any p >= 1) or p = infinity.
double lp_norm(const ScalarField& rho, double p);

/// Full H^1 norm squared: int |grad u|^2 + int |u|^2, gradients from stored ghosts.
double h1_seminorm_sq(const VelocityField& u);

/// Lebesgue norm of a face field with |f| taken at cell centres.
double face_lp_norm(const FaceField& f, double p);

/// ||u||_{H^1}^2 / (||D u||^2 + (int R |u|)^2); 0 for u = 0.
double korn_ratio(const VelocityField& u, const ScalarField& weight);

/// Time-dependent discrete test field for the weak formulation.
using TestFieldFn = std::function<VelocityField(double t)>;

/// Divergence-free, tangent test field: discrete curl of psi (vanishing on the
/// walls) times the cutoff cos^2(pi t / (2 T)), which vanishes at t = T.
TestFieldFn stream_test_field(const GridSpec& grid, ScalarFn psi, double t_final, double friction);

/// Streaming evaluation of the weak-formulation residual
///   -sum <m^{k+1}, phi^{k+1} - phi^k> - <m^0, phi^0>
///   + sum dt [2 nu alpha tr(u, phi) + 2 nu <D u, D phi> + <C(rho, u), phi> - <rho f, phi>]
/// with m = rho_f u and every bracket at the new time level.
class WeakResidual {
public:
    WeakResidual(const SimConfig& config, TestFieldFn phi);
    void add(const FluidState& state);
    double value() const { return value_; }

private:
    SimConfig config_;
    TestFieldFn phi_;
    bool started_ = false;
    double t_prev_ = 0.0;
    VelocityField phi_prev_;
    double value_ = 0.0;
};

double weak_residual(const std::vector<FluidState>& trajectory, const TestFieldFn& phi,
                     const SimConfig& config);

struct BoundReport {
    double t = 0.0;
    double viscosity = 0.0;
    double lhs = 0.0;
    double data_term = 0.0;
    double visc_term = 0.0;
    double forcing_term = 0.0;
    double fitted_C = 0.0;
    bool violation = false;
    bool lhs_monotone_in_t = true;
};

/// Accumulates the viscous-limit comparison for one viscosity. `add` takes the
/// viscous state and the reference (inviscid) state at the same time level.
class BoundAccumulator {
public:
    /// forcing_exponent p gives the spatial norm L^{2p/(p-1)} for f - f^nu.
    BoundAccumulator(double viscosity, double forcing_exponent = 6.0);

    /// Initial-data mismatch ||sqrt(rho0) u0 - v0nu / sqrt(rho0nu)||^2 + ||rho0 - rho0nu||^2
    /// on faces, with v0nu = rho0nu_f u0nu.
    void set_initial(const FluidState& reference, const FluidState& viscous);
    void add(const FluidState& viscous, const FluidState& reference, double dt,
             const FaceField* forcing_difference = nullptr);
    const BoundReport& report() const { return report_; }
    const std::vector<double>& lhs_history() const { return lhs_history_; }

private:
    double forcing_exponent_;
    BoundReport report_;
    std::vector<double> lhs_history_;
};

/// ||u - u_ref||^2 + ||rho - rho_ref||^2.
double difference_sq(const FluidState& a, const FluidState& b);

/// Least-squares constant through the origin of lhs against
/// data_term + visc_term + forcing_term; sets fitted_C on every report and flags
/// members whose lhs exceeds 1.1 * C times their right-hand side.
double fit_bound_constant(std::vector<BoundReport>& reports);

} // namespace navslip
