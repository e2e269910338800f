#include "navslip/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "navslip/error.hpp"
#include "navslip/operators.hpp"

namespace navslip {

namespace {

/// sum(w_face * a * b * c dA), the face quadrature used for all face inner products.
double face_triple(const FaceField& a, const FaceField& b, const FaceField& c) {
    const GridSpec& g = a.grid;
    double sum = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) sum += g.xface_weight(i) * a.x(i, j) * b.x(i, j) * c.x(i, j);
    for (int j = 0; j <= g.ny; ++j) {
        const double w = g.yface_weight(j);
        for (int i = 0; i < g.nx; ++i) sum += w * a.y(i, j) * b.y(i, j) * c.y(i, j);
    }
    return sum * g.cell_area();
}

FaceField difference(const FaceField& a, const FaceField& b) {
    FaceField d(a.grid);
    for (std::size_t k = 0; k < d.x.raw().size(); ++k) d.x.raw()[k] = a.x.raw()[k] - b.x.raw()[k];
    for (std::size_t k = 0; k < d.y.raw().size(); ++k) d.y.raw()[k] = a.y.raw()[k] - b.y.raw()[k];
    return d;
}

VelocityField with_slip_ghosts(const VelocityField& u, double alpha) {
    VelocityField c = u;
    c.refresh_ghosts(alpha);
    return c;
}

} // namespace

double kinetic_energy(const ScalarField& rho, const VelocityField& u) {
    return 0.5 * face_triple(face_density(rho), u, u);
}

double power(const ScalarField& rho, const FaceField& f, const VelocityField& u) {
    return face_triple(face_density(rho), f, u);
}

EnergyLedger ledger_start(const FluidState& state) {
    EnergyLedger l;
    l.t = state.t;
    l.kinetic = kinetic_energy(state.rho, state.u);
    l.kinetic_initial = l.kinetic;
    return l;
}

EnergyLedger ledger_update(const EnergyLedger& ledger, const FluidState& state,
                           const SimConfig& config, double dt) {
    require(dt > 0.0, "ledger_update: time step must be positive");
    const VelocityField u = with_slip_ghosts(state.u, config.friction);
    EnergyLedger l = ledger;
    l.t = state.t;
    l.kinetic = kinetic_energy(state.rho, u);
    if (config.viscosity > 0.0) {
        l.dissipation_acc += dt * 2.0 * config.viscosity * deformation_energy(u);
        if (config.friction > 0.0)
            l.friction_acc += dt * 2.0 * config.viscosity * config.friction * boundary_speed_sq_integral(u);
    }
    if (config.forcing)
        l.work_acc += dt * power(state.rho, sample_forcing(u.grid, config.forcing, state.t), u);
    return l;
}

double energy_residual(const EnergyLedger& l) {
    return l.kinetic + l.dissipation_acc + l.friction_acc - l.kinetic_initial - l.work_acc;
}

double lp_norm(const ScalarField& rho, double p) {
    const GridSpec& g = rho.grid;
    if (std::isinf(p) && p > 0) return max_abs(rho);
    require(p >= 1.0 && std::isfinite(p), "lp_norm: unsupported exponent " + std::to_string(p));
    double scale = max_abs(rho);
    if (scale == 0.0) return 0.0;
    double sum = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) sum += std::pow(std::abs(rho(i, j)) / scale, p);
    return scale * std::pow(sum * g.cell_area(), 1.0 / p);
}

double h1_seminorm_sq(const VelocityField& u_in) {
    VelocityField u = u_in;
    u.sync_periodic();
    const GridSpec& g = u.grid;
    double cells = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double dxx = (u.x(i + 1, j) - u.x(i, j)) / g.dx;
            const double dyy = (u.y(i, j + 1) - u.y(i, j)) / g.dy;
            cells += dxx * dxx + dyy * dyy;
        }
    double corners = 0.0;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.corner_i_end(); ++i) {
            const double dyx = (u.x(i, j) - u.x(i, j - 1)) / g.dy;
            const double dxy = (u.y(i, j) - u.y(i - 1, j)) / g.dx;
            corners += g.corner_weight(i, j) * (dyx * dyx + dxy * dxy);
        }
    return (cells + corners) * g.cell_area() + face_inner(u, u);
}

double face_lp_norm(const FaceField& f_in, double p) {
    FaceField f = f_in;
    f.sync_periodic();
    const GridSpec& g = f.grid;
    require(p >= 1.0, "face_lp_norm: exponent must be at least 1");
    double sum = 0.0;
    double mx = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double cx = 0.5 * (f.x(i, j) + f.x(i + 1, j));
            const double cy = 0.5 * (f.y(i, j) + f.y(i, j + 1));
            const double m = std::hypot(cx, cy);
            mx = std::max(mx, m);
            if (std::isfinite(p)) sum += std::pow(m, p);
        }
    if (!std::isfinite(p)) return mx;
    return std::pow(sum * g.cell_area(), 1.0 / p);
}

double korn_ratio(const VelocityField& u_in, const ScalarField& weight) {
    const GridSpec& g = u_in.grid;
    require(weight.grid == g, "korn_ratio: weight lives on another grid");
    double mass = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            require(weight(i, j) >= 0.0, "korn_ratio: weight must be non-negative");
            mass += weight(i, j);
        }
    require(mass > 0.0, "korn_ratio: weight must have positive integral");

    VelocityField u = u_in;
    u.sync_periodic();
    double weighted = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double cx = 0.5 * (u.x(i, j) + u.x(i + 1, j));
            const double cy = 0.5 * (u.y(i, j) + u.y(i, j + 1));
            weighted += weight(i, j) * std::hypot(cx, cy);
        }
    weighted *= g.cell_area();
    const double num = h1_seminorm_sq(u);
    const double den = deformation_energy(u) + weighted * weighted;
    if (den == 0.0) return 0.0;
    return num / den;
}

TestFieldFn stream_test_field(const GridSpec& grid, ScalarFn psi, double t_final, double friction) {
    require(t_final > 0.0, "stream_test_field: final time must be positive");
    VelocityField base = curl_of_stream(grid, psi);
    base.pin_normals();
    base.refresh_ghosts(friction);
    return [base, t_final](double t) {
        const double s = (t >= t_final) ? 0.0 : std::pow(std::cos(0.5 * M_PI * t / t_final), 2);
        VelocityField phi = base;
        for (double& v : phi.x.raw()) v *= s;
        for (double& v : phi.y.raw()) v *= s;
        return phi;
    };
}

WeakResidual::WeakResidual(const SimConfig& config, TestFieldFn phi)
    : config_(config), phi_(std::move(phi)) {
    require(static_cast<bool>(phi_), "weak residual: missing test field");
}

void WeakResidual::add(const FluidState& state) {
    VelocityField phi = phi_(state.t);
    require(phi.grid == state.u.grid, "weak residual: test field lives on another grid");
    require(phi.impermeable(), "weak residual: test field violates impermeability");
    const double div = max_abs(divergence(phi));
    const double scale = max_abs(phi) / std::min(phi.grid.dx, phi.grid.dy);
    require(div <= 1e-9 * scale + 1e-300, "weak residual: test field is not divergence-free");
    phi.refresh_ghosts(config_.friction);

    const FaceField rho_f = face_density(state.rho);
    const VelocityField u = with_slip_ghosts(state.u, config_.friction);
    if (!started_) {
        value_ -= face_triple(rho_f, u, phi);
        started_ = true;
    } else {
        const double dt = state.t - t_prev_;
        require(dt > 0.0, "weak residual: states must be added in increasing time");
        const double nu = config_.viscosity;
        double bracket = 2.0 * nu * config_.friction * boundary_trace_inner(u, phi) +
                         2.0 * nu * deformation_inner(u, phi) +
                         face_inner(advect_momentum(state.rho, u, config_.density.flux_mode), phi);
        if (config_.forcing)
            bracket -= face_triple(rho_f, sample_forcing(u.grid, config_.forcing, state.t), phi);
        value_ += -face_triple(rho_f, u, difference(phi, phi_prev_)) + dt * bracket;
    }
    t_prev_ = state.t;
    phi_prev_ = std::move(phi);
}

double weak_residual(const std::vector<FluidState>& trajectory, const TestFieldFn& phi,
                     const SimConfig& config) {
    require(!trajectory.empty(), "weak residual: empty trajectory");
    const VelocityField last = phi(trajectory.back().t);
    const VelocityField first = phi(trajectory.front().t);
    require(max_abs(last) <= 1e-12 * std::max(max_abs(first), 1e-300) || max_abs(last) == 0.0,
            "weak residual: test field does not vanish at the final time");
    WeakResidual acc(config, phi);
    for (const FluidState& s : trajectory) acc.add(s);
    return acc.value();
}

double difference_sq(const FluidState& a, const FluidState& b) {
    require(a.u.grid == b.u.grid, "difference_sq: mismatched grids");
    FaceField du = difference(a.u, b.u);
    ScalarField dr(a.rho.grid);
    for (int j = 0; j < dr.grid.ny; ++j)
        for (int i = 0; i < dr.grid.nx; ++i) dr(i, j) = a.rho(i, j) - b.rho(i, j);
    const double lu = face_l2(du);
    const double lr = cell_l2(dr);
    return lu * lu + lr * lr;
}

BoundAccumulator::BoundAccumulator(double viscosity, double forcing_exponent)
    : forcing_exponent_(forcing_exponent) {
    require(viscosity >= 0.0, "bound report: viscosity must be non-negative");
    require(forcing_exponent > 1.0, "bound report: forcing exponent must exceed 1");
    report_.viscosity = viscosity;
}

void BoundAccumulator::set_initial(const FluidState& reference, const FluidState& viscous) {
    require(reference.u.grid == viscous.u.grid, "bound report: mismatched grids");
    const FaceField rf = face_density(reference.rho);
    const FaceField vf = face_density(viscous.rho);
    FaceField d(rf.grid);
    for (std::size_t k = 0; k < d.x.raw().size(); ++k)
        d.x.raw()[k] = std::sqrt(std::max(rf.x.raw()[k], 0.0)) * reference.u.x.raw()[k] -
                       std::sqrt(std::max(vf.x.raw()[k], 0.0)) * viscous.u.x.raw()[k];
    for (std::size_t k = 0; k < d.y.raw().size(); ++k)
        d.y.raw()[k] = std::sqrt(std::max(rf.y.raw()[k], 0.0)) * reference.u.y.raw()[k] -
                       std::sqrt(std::max(vf.y.raw()[k], 0.0)) * viscous.u.y.raw()[k];
    ScalarField dr(reference.rho.grid);
    for (int j = 0; j < dr.grid.ny; ++j)
        for (int i = 0; i < dr.grid.nx; ++i) dr(i, j) = reference.rho(i, j) - viscous.rho(i, j);
    const double a = face_l2(d);
    const double b = cell_l2(dr);
    report_.data_term = a * a + b * b;
}

void BoundAccumulator::add(const FluidState& viscous, const FluidState& reference, double dt,
                           const FaceField* forcing_difference) {
    require(std::abs(viscous.t - reference.t) <= 1e-9 * std::max(1.0, std::abs(reference.t)),
            "bound report: viscous and reference times differ");
    require(dt > 0.0, "bound report: time step must be positive");
    const double lhs = difference_sq(viscous, reference);
    if (!lhs_history_.empty() && lhs < lhs_history_.back() * (1.0 - 1e-12) - 1e-300)
        report_.lhs_monotone_in_t = false;
    lhs_history_.push_back(lhs);
    report_.t = viscous.t;
    report_.lhs = lhs;
    report_.visc_term += dt * report_.viscosity * h1_seminorm_sq(reference.u);
    if (forcing_difference) {
        const double q = 2.0 * forcing_exponent_ / (forcing_exponent_ - 1.0);
        report_.forcing_term += dt * face_lp_norm(*forcing_difference, q);
    }
}

double fit_bound_constant(std::vector<BoundReport>& reports) {
    auto rhs = [](const BoundReport& r) { return r.data_term + r.visc_term + r.forcing_term; };
    double num = 0.0;
    double den = 0.0;
    for (const BoundReport& r : reports) {
        num += r.lhs * rhs(r);
        den += rhs(r) * rhs(r);
    }
    require(den > 0.0, "fit_bound_constant: every right-hand side vanishes");
    const double c = num / den;
    for (BoundReport& r : reports) {
        r.fitted_C = c;
        r.violation = r.lhs > 1.1 * c * rhs(r);
    }
    return c;
}

} // namespace navslip
