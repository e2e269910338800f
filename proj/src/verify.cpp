#include "navslip/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "navslip/error.hpp"
#include "navslip/operators.hpp"

namespace navslip {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(4);
    o << v;
    return o.str();
}

/// Stream functions vanishing with their normal derivative on the unit-square walls.
std::vector<ScalarFn> stream_functions() {
    return {[](double x, double y) { return std::pow(std::sin(M_PI * x) * std::sin(M_PI * y), 2); },
            [](double x, double y) { return std::pow(std::sin(M_PI * x) * std::sin(M_PI * y), 2) * (1.0 + x * y); },
            [](double x, double y) { return std::pow(std::sin(M_PI * x) * std::sin(2.0 * M_PI * y), 2); }};
}

FaceField face_difference(const FaceField& a, const FaceField& b) {
    FaceField d = a;
    for (std::size_t k = 0; k < d.x.raw().size(); ++k) d.x.raw()[k] -= b.x.raw()[k];
    for (std::size_t k = 0; k < d.y.raw().size(); ++k) d.y.raw()[k] -= b.y.raw()[k];
    return d;
}

} // namespace

std::vector<double> observed_orders(const std::vector<double>& errors) {
    std::vector<double> out;
    for (std::size_t k = 1; k < errors.size(); ++k) out.push_back(std::log2(std::abs(errors[k - 1] / errors[k])));
    return out;
}

std::vector<MassRun> measure_mass_conservation(int n, long steps) {
    std::vector<MassRun> out;
    for (const std::string& name : scenario_names()) {
        const ScenarioSpec spec = scenario(name);
        RunSettings st = spec.defaults;
        st.nx = st.ny = n;
        st.lx = st.ly = 1.0;
        st.t_end = static_cast<double>(steps) * st.dt;
        const RunResult r = run(spec, make_config(spec, st));
        out.push_back({name, r.steps, r.max_mass_drift, r.seconds});
    }
    return out;
}

std::vector<DensityRangeRun> measure_density_range(int n, double t_end) {
    std::vector<DensityRangeRun> out;
    for (const std::string name : {"stratified_shear", "lid_forced"}) {
        const ScenarioSpec spec = scenario(name);
        RunSettings st = spec.defaults;
        st.nx = st.ny = n;
        st.t_end = t_end;
        st.flux_mode = FluxMode::upwind;
        const SimConfig cfg = make_config(spec, st);
        DensityRangeRun d;
        d.scenario = name;
        const ScalarField raw = sample_scalar(cfg.grid, spec.rho0);
        std::tie(d.rho0_min, d.rho0_max) = density_bounds(raw);
        d.rho_min = d.rho0_min;
        d.rho_max = d.rho0_max;
        double prev = lp_norm(scenario_initial_state(spec, cfg).rho, 6.0);
        d.lp6_max_increase = -1e300;
        RunOptions opts;
        opts.observer = [&](long, const FluidState& s, const EnergyLedger&, const StepInfo&) {
            const auto [lo, hi] = density_bounds(s.rho);
            d.rho_min = std::min(d.rho_min, lo);
            d.rho_max = std::max(d.rho_max, hi);
            const double norm = lp_norm(s.rho, 6.0);
            d.lp6_max_increase = std::max(d.lp6_max_increase, norm - prev);
            prev = norm;
        };
        const auto t0 = Clock::now();
        run(spec, cfg, opts);
        d.seconds = since(t0);
        out.push_back(d);
    }
    return out;
}

EnergyRefinement measure_energy_refinement() {
    const auto t0 = Clock::now();
    const ScenarioSpec spec = scenario("lid_forced");
    EnergyRefinement e;
    e.dt = spec.defaults.dt;
    e.max_residual = -1e300;
    for (int level = 0; level < 2; ++level) {
        RunSettings st = spec.defaults;
        st.dt = e.dt / (level == 0 ? 1.0 : 2.0);
        const RunResult r = run(spec, make_config(spec, st));
        for (const EnergyLedger& l : r.ledger) e.max_residual = std::max(e.max_residual, energy_residual(l));
        (level == 0 ? e.residual_coarse : e.residual_fine) = energy_residual(r.ledger.back());
        e.kinetic_initial = r.ledger.front().kinetic_initial;
    }
    e.seconds = since(t0);
    return e;
}

IbpStudy measure_slip_ibp(const std::vector<int>& meshes) {
    const auto t0 = Clock::now();
    IbpStudy s;
    std::vector<std::pair<double, double>> pts;
    for (int n : meshes) {
        const GridSpec g = build_grid(n, n, 1.0, 1.0);
        const VelocityField f =
            sample_velocity(g, [](double x, double y) { return Vec2{y * y + x * y, x * x * x}; });
        const VelocityField w = curl_of_stream(
            g, [](double x, double y) { return std::sin(M_PI * x) * std::sin(M_PI * y) * (1.0 + x + 2.0 * y); });
        const IbpReport r = ibp_identity(f, w);
        s.meshes.push_back(n);
        s.mismatch.push_back(r.mismatch);
        pts.emplace_back(1.0 / n, std::abs(r.mismatch));
    }
    s.fit = fit_rate(pts);
    s.seconds = since(t0);
    return s;
}

NavierAccuracy measure_navier_accuracy() {
    const auto t0 = Clock::now();
    NavierAccuracy a;
    {
        const ScenarioSpec spec = scenario("couette_robin");
        const SimConfig cfg = make_config(spec, spec.defaults);
        FluidState s = scenario_initial_state(spec, cfg);
        const VelocityField mode = spec.exact(cfg, 0.0).u;
        const double norm = face_inner(mode, mode);
        const double a0 = face_inner(s.u, mode) / norm;
        const double dt = cfg.effective_dt();
        for (long k = 0; k < cfg.step_count(); ++k) s = step(s, cfg, dt);
        const double a1 = face_inner(s.u, mode) / norm;
        a.couette_rate = -std::log(a1 / a0) / s.t;
        a.couette_viscosity = cfg.viscosity;
        a.couette_friction = cfg.friction;
        a.couette_density = integrate(s.rho) / (cfg.grid.lx * cfg.grid.ly);
        a.couette_height = cfg.grid.ly;
    }
    {
        const ScenarioSpec spec = scenario("taylor_green_freeslip");
        for (int n : {16, 32, 64}) {
            RunSettings st = spec.defaults;
            st.nx = st.ny = n;
            st.dt = 1.25e-4;
            st.t_end = 0.25;
            const SimConfig cfg = make_config(spec, st);
            const RunResult r = run(spec, cfg);
            const FluidState exact = spec.exact(cfg, r.final_state.t);
            a.tg_meshes.push_back(n);
            a.tg_error.push_back(face_l2(face_difference(r.final_state.u, exact.u)));
        }
    }
    a.seconds = since(t0);
    return a;
}

InviscidStudy measure_inviscid_limit(bool deterministic, const std::string& out_dir) {
    const auto t0 = Clock::now();
    const ScenarioSpec spec = scenario("stratified_shear");
    RunSettings st = spec.defaults;
    st.nx = st.ny = 128;
    st.t_end = 0.5;
    SweepOptions opts;
    opts.deterministic = deterministic;
    opts.out_dir = out_dir;
    InviscidStudy s;
    s.sweep = sweep(spec, st, {1e-2, 3e-3, 1e-3, 3e-4, 1e-4}, opts);
    s.seconds = since(t0);
    return s;
}

WeakResidualStudy measure_weak_residual() {
    const auto t0 = Clock::now();
    const ScenarioSpec spec = scenario("taylor_green_freeslip");
    const double t_final = 0.25;
    const std::vector<ScalarFn> psis = stream_functions();
    WeakResidualStudy w;
    for (int n : {16, 32, 64}) {
        RunSettings st = spec.defaults;
        st.nx = st.ny = n;
        st.dt = 0.16 / n;
        st.t_end = t_final;
        const SimConfig cfg = make_config(spec, st);
        std::vector<WeakResidual> acc;
        for (const ScalarFn& psi : psis) acc.emplace_back(cfg, stream_test_field(cfg.grid, psi, t_final, cfg.friction));
        FluidState s = scenario_initial_state(spec, cfg);
        for (WeakResidual& r : acc) r.add(s);
        const double dt = cfg.effective_dt();
        for (long k = 0; k < cfg.step_count(); ++k) {
            s = step(s, cfg, dt);
            for (WeakResidual& r : acc) r.add(s);
        }
        w.meshes.push_back(n);
        w.dt.push_back(dt);
        w.residual.push_back({acc[0].value(), acc[1].value(), acc[2].value()});
    }
    w.seconds = since(t0);
    return w;
}

ProjectionStudy measure_projection(int trials, unsigned seed) {
    const auto t0 = Clock::now();
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> dens(0.5, 2.0);
    ProjectionStudy p;
    p.trials = trials;
    for (int t = 0; t < trials; ++t) {
        const int nx = 8 + static_cast<int>(rng() % 40);
        const int ny = 8 + static_cast<int>(rng() % 40);
        const GridSpec g =
            build_grid(nx, ny, 1.0, 0.5 + dens(rng), (t % 2) ? Topology::channel : Topology::box);
        SimConfig cfg;
        cfg.grid = g;
        p.poisson_tol = cfg.poisson_tol;
        ScalarField rho(g);
        ScalarField q(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                rho(i, j) = dens(rng);
                q(i, j) = unit(rng);
            }
        rho.refresh_ghosts();
        q.refresh_ghosts();
        const double dt = 0.01 + 0.1 * (unit(rng) + 1.0);

        // (dt / rho_f) grad q lies exactly in the range the projection removes.
        const FaceField gq = gradient(q);
        const FaceField rf = face_density(rho);
        VelocityField grad(g);
        for (std::size_t k = 0; k < grad.x.raw().size(); ++k) grad.x.raw()[k] = dt * gq.x.raw()[k] / rf.x.raw()[k];
        for (std::size_t k = 0; k < grad.y.raw().size(); ++k) grad.y.raw()[k] = dt * gq.y.raw()[k] / rf.y.raw()[k];
        grad.pin_normals();
        grad.sync_periodic();
        const ProjectionResult pg = pressure_project(grad, rho, dt, cfg);
        p.worst_gradient_ratio = std::max(p.worst_gradient_ratio, face_l2(pg.u) / face_l2(grad));

        VelocityField w(g);
        for (double& v : w.x.raw()) v = unit(rng);
        for (double& v : w.y.raw()) v = unit(rng);
        w.pin_normals();
        w.sync_periodic();
        const ProjectionResult pw = pressure_project(w, rho, dt, cfg);
        p.worst_divergence_ratio = std::max(p.worst_divergence_ratio, cell_l2(divergence(pw.u)) / face_l2(w));
    }
    p.seconds = since(t0);
    return p;
}

KornStudy measure_korn_stability(const std::vector<int>& meshes) {
    const auto t0 = Clock::now();
    KornStudy k;
    k.meshes = meshes;
    for (const ScalarFn& psi : stream_functions()) {
        std::vector<double> row;
        for (int n : meshes) {
            const GridSpec g = build_grid(n, n, 1.0, 1.0);
            VelocityField u = curl_of_stream(g, psi);
            u.pin_normals();
            u.refresh_ghosts(0.0);
            row.push_back(korn_ratio(u, ScalarField(g, 1.0)));
        }
        const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
        k.worst_spread = std::max(k.worst_spread, (*hi - *lo) / *lo);
        k.ratios.push_back(row);
    }
    k.seconds = since(t0);
    return k;
}

CompensationStudy measure_eps_compensation() {
    const auto t0 = Clock::now();
    const ScenarioSpec spec = scenario("lid_forced");
    CompensationStudy c;
    for (bool on : {true, false}) {
        RunSettings st = spec.defaults;
        st.eps_compensation = on;
        const SimConfig cfg = make_config(spec, st);
        // Backward Euler dissipates 1/2 sum rho^n_f |u^{n+1} - u^n|^2 per step;
        // adding it back isolates the part of the residual the density
        // diffusion is responsible for.
        FluidState prev = scenario_initial_state(spec, cfg);
        double numerical = 0.0;
        double worst = 0.0;
        double k0 = 0.0;
        RunOptions opts;
        opts.observer = [&](long, const FluidState& s, const EnergyLedger& l, const StepInfo&) {
            const FaceField rf = face_density(prev.rho);
            const FaceField du = face_difference(s.u, prev.u);
            FaceField w = du;
            for (std::size_t q = 0; q < w.x.raw().size(); ++q) w.x.raw()[q] *= rf.x.raw()[q];
            for (std::size_t q = 0; q < w.y.raw().size(); ++q) w.y.raw()[q] *= rf.y.raw()[q];
            numerical += 0.5 * face_inner(w, du);
            worst = std::max(worst, std::abs(energy_residual(l) + numerical));
            k0 = l.kinetic_initial;
            prev = s;
        };
        run(spec, cfg, opts);
        (on ? c.residual_with : c.residual_without) = worst / k0;
    }
    c.seconds = since(t0);
    return c;
}

CheckResult evaluate_mass_conservation(const std::vector<MassRun>& runs) {
    CheckResult c{1, "mass conservation", true, "", 0.0, 10.0};
    std::ostringstream d;
    for (const MassRun& r : runs) {
        const bool ok = r.drift <= 1e-12 && r.seconds <= c.budget_seconds;
        c.passed = c.passed && ok;
        c.seconds = std::max(c.seconds, r.seconds);
        d << r.scenario << " drift " << fmt(r.drift) << " (" << fmt(r.seconds) << " s); ";
    }
    c.detail = d.str() + "limit 1e-12, 10 s per scenario";
    return c;
}

CheckResult evaluate_maximum_principle(const std::vector<DensityRangeRun>& runs) {
    CheckResult c{2, "maximum principle", true, "", 0.0, 30.0};
    std::ostringstream d;
    for (const DensityRangeRun& r : runs) {
        c.passed = c.passed && r.rho_min >= 1.0 - 1e-10 && r.rho_max <= 2.0 + 1e-10;
        c.seconds += r.seconds;
        d << r.scenario << " range [" << r.rho_min << ", " << r.rho_max << "]; ";
    }
    c.passed = c.passed && c.seconds <= c.budget_seconds;
    c.detail = d.str() + "allowed [1 - 1e-10, 2 + 1e-10]";
    return c;
}

CheckResult evaluate_lp_monotonicity(const std::vector<DensityRangeRun>& runs) {
    CheckResult c{3, "L6 monotonicity", true, "", 0.0, 30.0};
    std::ostringstream d;
    for (const DensityRangeRun& r : runs) {
        c.passed = c.passed && r.lp6_max_increase <= 1e-10;
        c.seconds += r.seconds;
        d << r.scenario << " max step increase " << fmt(r.lp6_max_increase) << "; ";
    }
    c.detail = d.str() + "allowed 1e-10";
    return c;
}

CheckResult evaluate_energy_identity(const EnergyRefinement& e) {
    CheckResult c{4, "energy identity", false, "", e.seconds, 60.0};
    const double ratio = e.residual_coarse / e.residual_fine;
    const double cap = 1e-8 * e.kinetic_initial;
    c.passed = ratio >= 1.85 && e.max_residual <= cap && e.seconds <= c.budget_seconds;
    c.detail = "residual dt " + fmt(e.residual_coarse) + ", dt/2 " + fmt(e.residual_fine) + ", ratio " + fmt(ratio) +
               " (>= 1.85); max residual " + fmt(e.max_residual) + " (<= " + fmt(cap) + ")";
    return c;
}

CheckResult evaluate_slip_ibp(const IbpStudy& s) {
    CheckResult c{5, "slip integration by parts", false, "", s.seconds, 10.0};
    c.passed = s.fit.slope >= 1.8 && s.fit.r_squared >= 0.99 && s.seconds <= c.budget_seconds;
    std::ostringstream d;
    for (std::size_t k = 0; k < s.meshes.size(); ++k) d << s.meshes[k] << ": " << fmt(s.mismatch[k]) << "; ";
    c.detail = d.str() + "order " + fmt(s.fit.slope) + " (>= 1.8), r2 " + fmt(s.fit.r_squared) + " (>= 0.99)";
    return c;
}

CheckResult evaluate_navier_accuracy(const NavierAccuracy& a) {
    CheckResult c{6, "Navier-slip accuracy", false, "", a.seconds, 120.0};
    const double k = robin_wavenumber(a.couette_friction * a.couette_height);
    const double expected = a.couette_viscosity * k * k / (a.couette_height * a.couette_height * a.couette_density);
    const double rel = std::abs(a.couette_rate / expected - 1.0);
    const std::vector<double> orders = observed_orders(a.tg_error);
    const double worst = *std::min_element(orders.begin(), orders.end());
    c.passed = rel <= 0.01 && worst >= 1.8 && a.seconds <= c.budget_seconds;
    std::ostringstream d;
    d << "couette rate " << fmt(a.couette_rate) << " vs " << fmt(expected) << " (rel " << fmt(rel)
      << ", <= 0.01); taylor-green errors";
    for (double e : a.tg_error) d << ' ' << fmt(e);
    d << ", orders";
    for (double o : orders) d << ' ' << fmt(o);
    d << " (>= 1.8)";
    c.detail = d.str();
    return c;
}

CheckResult evaluate_inviscid_limit(const InviscidStudy& s) {
    CheckResult c{7, "inviscid limit", false, "", s.seconds, 900.0};
    const SweepResult& r = s.sweep;
    std::ostringstream d;
    if (!r.fit) {
        c.detail = r.fit_note;
        return c;
    }
    double worst = 0.0;
    for (const BoundReport& b : r.reports)
        worst = std::max(worst, b.lhs / (b.fitted_C * (b.data_term + b.visc_term + b.forcing_term)));
    c.passed = r.fit->slope >= 0.45 && r.fit->slope <= 0.60 && r.fit->r_squared >= 0.98 && !r.any_violation &&
               s.seconds <= c.budget_seconds;
    d << "slope " << fmt(r.fit->slope) << " (in [0.45, 0.60]), r2 " << fmt(r.fit->r_squared)
      << " (>= 0.98); worst lhs / (C rhs) " << fmt(worst) << " (<= 1.1); errors";
    for (const SweepRow& row : r.rows) d << ' ' << fmt(row.err_u_l2);
    if (!r.lhs_monotone_in_t) d << "; lhs not monotone in t";
    if (!r.lhs_monotone_in_nu) d << "; lhs not monotone in nu";
    c.detail = d.str();
    return c;
}

CheckResult evaluate_weak_residual(const WeakResidualStudy& s) {
    CheckResult c{8, "weak-form residual", true, "", s.seconds, 0.0};
    std::ostringstream d;
    for (int f = 0; f < 3; ++f) {
        std::vector<double> col;
        for (const auto& r : s.residual) col.push_back(r[static_cast<std::size_t>(f)]);
        const std::vector<double> orders = observed_orders(col);
        d << "field " << f << " orders";
        for (double o : orders) {
            d << ' ' << fmt(o);
            c.passed = c.passed && o >= 0.9;
        }
        d << "; ";
    }
    c.detail = d.str() + "required >= 0.9";
    return c;
}

CheckResult evaluate_projection(const ProjectionStudy& p) {
    CheckResult c{9, "projection", false, "", p.seconds, 0.0};
    const double cap = 10.0 * p.poisson_tol;
    c.passed = p.worst_gradient_ratio <= cap && p.worst_divergence_ratio <= cap;
    c.detail = std::to_string(p.trials) + " trials; gradient residue " + fmt(p.worst_gradient_ratio) +
               ", divergence " + fmt(p.worst_divergence_ratio) + " (<= " + fmt(cap) + ")";
    return c;
}

CheckResult evaluate_korn_stability(const KornStudy& k) {
    CheckResult c{0, "Korn ratio stability", k.worst_spread < 0.05, "", k.seconds, 0.0};
    c.detail = "worst relative spread " + fmt(k.worst_spread) + " (< 0.05)";
    return c;
}

CheckResult evaluate_eps_compensation(const CompensationStudy& s) {
    CheckResult c{0, "density-diffusion compensation", s.residual_with <= s.residual_without, "", s.seconds, 0.0};
    c.detail = "max |residual + time dissipation| / K0 with " + fmt(s.residual_with) + ", without " + fmt(s.residual_without);
    return c;
}

std::vector<CheckResult> run_suite(const std::string& suite, bool deterministic) {
    require(suite == "identities" || suite == "energy" || suite == "rates" || suite == "all",
            "unknown suite '" + suite + "' (identities, energy, rates, all)");
    std::vector<CheckResult> out;
    const bool all = suite == "all";
    if (all || suite == "identities") {
        out.push_back(evaluate_mass_conservation(measure_mass_conservation()));
        const std::vector<DensityRangeRun> range = measure_density_range();
        out.push_back(evaluate_maximum_principle(range));
        out.push_back(evaluate_lp_monotonicity(range));
        out.push_back(evaluate_slip_ibp(measure_slip_ibp()));
        out.push_back(evaluate_projection(measure_projection()));
        out.push_back(evaluate_korn_stability(measure_korn_stability()));
    }
    if (all || suite == "energy") {
        out.push_back(evaluate_energy_identity(measure_energy_refinement()));
        out.push_back(evaluate_weak_residual(measure_weak_residual()));
        out.push_back(evaluate_eps_compensation(measure_eps_compensation()));
    }
    if (all || suite == "rates") {
        out.push_back(evaluate_navier_accuracy(measure_navier_accuracy()));
        out.push_back(evaluate_inviscid_limit(measure_inviscid_limit(deterministic)));
    }
    return out;
}

} // namespace navslip
