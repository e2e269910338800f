#include "navslip/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "navslip/error.hpp"

namespace navslip {

namespace fs = std::filesystem;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    require(points.size() >= 2, "fit_rate: need at least two points");
    for (const auto& [x, y] : points)
        require(x > 0.0 && y > 0.0 && std::isfinite(x) && std::isfinite(y),
                "fit_rate: viscosities and errors must be positive and finite");
    const double n = static_cast<double>(points.size());
    double sx = 0, sy = 0;
    for (const auto& [x, y] : points) {
        sx += std::log(x);
        sy += std::log(y);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx;
        const double dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    require(sxx > 0.0, "fit_rate: need at least two distinct viscosities");
    RateFit f;
    f.points = points;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

void write_ledger_csv(const std::string& path, const std::vector<EnergyLedger>& ledger) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "cannot write '" + path + "'");
    out << "step,t,kinetic,dissipation_acc,friction_acc,work_acc,residual\n";
    for (std::size_t k = 0; k < ledger.size(); ++k) {
        const EnergyLedger& l = ledger[k];
        out << k << ',' << format_double(l.t) << ',' << format_double(l.kinetic) << ','
            << format_double(l.dissipation_acc) << ',' << format_double(l.friction_acc) << ','
            << format_double(l.work_acc) << ',' << format_double(energy_residual(l)) << '\n';
    }
}

namespace {

void write_array(const std::string& dir, long step, const std::string& name, const GridSpec& g, double t,
                 const Array2D& a, int ni, int nj, const std::string& location) {
    const std::string stem = dir + "/snapshot_" + std::to_string(step) + "_" + name;
    {
        std::ofstream bin(stem + ".bin", std::ios::binary);
        require(static_cast<bool>(bin), "cannot write '" + stem + ".bin'");
        for (int j = 0; j < nj; ++j)
            for (int i = 0; i < ni; ++i) {
                const double v = a(i, j);
                bin.write(reinterpret_cast<const char*>(&v), sizeof v);
            }
    }
    std::ofstream txt(stem + ".txt");
    txt << "field " << name << "\n"
        << "time " << format_double(t) << "\n"
        << "step " << step << "\n"
        << "grid nx=" << g.nx << " ny=" << g.ny << " lx=" << format_double(g.lx) << " ly=" << format_double(g.ly)
        << " topology=" << to_string(g.topology) << "\n"
        << "layout " << ni << " x " << nj << " float64 little-endian, i fastest, " << location << "\n";
}

} // namespace

void write_snapshot(const std::string& dir, long step, const FluidState& s) {
    fs::create_directories(dir);
    const GridSpec& g = s.rho.grid;
    write_array(dir, step, "rho", g, s.t, s.rho.values, g.nx, g.ny, "cell centres");
    write_array(dir, step, "pressure", g, s.t, s.pressure.values, g.nx, g.ny, "cell centres");
    write_array(dir, step, "u_x", g, s.t, s.u.x, g.nx + 1, g.ny, "vertical faces x = i dx");
    write_array(dir, step, "u_y", g, s.t, s.u.y, g.nx, g.ny + 1, "horizontal faces y = j dy");
}

RunResult run(const ScenarioSpec& spec, const SimConfig& config, const RunOptions& options) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    RunResult res;
    FluidState state = scenario_initial_state(spec, config);
    res.initial = state;
    EnergyLedger ledger = ledger_start(state);
    res.ledger.push_back(ledger);
    res.mass_initial = integrate(state.rho);
    std::tie(res.rho_min, res.rho_max) = density_bounds(state.rho);
    if (options.keep_trajectory) res.trajectory.push_back(state);
    if (!options.out_dir.empty()) {
        fs::create_directories(options.out_dir);
        if (options.snapshot_every > 0) write_snapshot(options.out_dir, 0, state);
    }

    const long n = config.step_count();
    const double dt = config.effective_dt();
    for (long k = 1; k <= n; ++k) {
        StepInfo info;
        try {
            state = step(state, config, dt, &info);
        } catch (const SolverError& e) {
            throw SolverError("step " + std::to_string(k) + " (t = " + format_double(state.t + dt) + "): " + e.what());
        }
        ledger = ledger_update(ledger, state, config, dt);
        res.ledger.push_back(ledger);
        const double drift = std::abs(integrate(state.rho) - res.mass_initial) / std::abs(res.mass_initial);
        res.max_mass_drift = std::max(res.max_mass_drift, drift);
        const auto [lo, hi] = density_bounds(state.rho);
        res.rho_min = std::min(res.rho_min, lo);
        res.rho_max = std::max(res.rho_max, hi);
        if (options.keep_trajectory) res.trajectory.push_back(state);
        if (options.observer) options.observer(k, state, ledger, info);
        if (!options.out_dir.empty() && options.snapshot_every > 0 && k % options.snapshot_every == 0)
            write_snapshot(options.out_dir, k, state);
    }
    res.steps = n;
    res.final_state = std::move(state);
    if (!options.out_dir.empty()) write_ledger_csv(options.out_dir + "/ledger.csv", res.ledger);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

namespace {

/// 2:1 restriction: cells averaged over 2x2 blocks, faces over the two fine
/// faces covering the coarse one.
FluidState restrict_state(const FluidState& fine, const GridSpec& coarse, double friction) {
    FluidState c;
    c.t = fine.t;
    c.rho = ScalarField(coarse);
    c.u = VelocityField(coarse);
    c.pressure = ScalarField(coarse);
    for (int j = 0; j < coarse.ny; ++j)
        for (int i = 0; i < coarse.nx; ++i) {
            c.rho(i, j) = 0.25 * (fine.rho(2 * i, 2 * j) + fine.rho(2 * i + 1, 2 * j) + fine.rho(2 * i, 2 * j + 1) +
                                  fine.rho(2 * i + 1, 2 * j + 1));
            c.pressure(i, j) = 0.25 * (fine.pressure(2 * i, 2 * j) + fine.pressure(2 * i + 1, 2 * j) +
                                       fine.pressure(2 * i, 2 * j + 1) + fine.pressure(2 * i + 1, 2 * j + 1));
        }
    for (int j = 0; j < coarse.ny; ++j)
        for (int i = 0; i <= coarse.nx; ++i) c.u.x(i, j) = 0.5 * (fine.u.x(2 * i, 2 * j) + fine.u.x(2 * i, 2 * j + 1));
    for (int j = 0; j <= coarse.ny; ++j)
        for (int i = 0; i < coarse.nx; ++i) c.u.y(i, j) = 0.5 * (fine.u.y(2 * i, 2 * j) + fine.u.y(2 * i + 1, 2 * j));
    c.rho.refresh_ghosts();
    c.pressure.refresh_ghosts();
    c.u.pin_normals();
    c.u.refresh_ghosts(friction);
    return c;
}

/// Reference states on the coarse grid at each coarse step.
class Reference {
public:
    Reference(const ScenarioSpec& spec, const RunSettings& settings, double nu_ref) : spec_(spec) {
        if (spec.exact) return;
        RunSettings fine = settings;
        fine.nx *= 2;
        fine.ny *= 2;
        fine.viscosity = nu_ref;
        fine.dt = 0.5 * make_config(spec, settings).effective_dt();
        const SimConfig coarse_cfg = make_config(spec, settings);
        const SimConfig fine_cfg = make_config(spec, fine);
        require(fine_cfg.step_count() == 2 * coarse_cfg.step_count(),
                "Richardson reference: fine run does not align with the coarse steps");
        RunOptions opts;
        opts.observer = [&](long k, const FluidState& s, const EnergyLedger&, const StepInfo&) {
            if (k % 2 == 0) states_.push_back(restrict_state(s, coarse_cfg.grid, coarse_cfg.friction));
        };
        RunResult r = run(spec, fine_cfg, opts);
        states_.insert(states_.begin(), restrict_state(r.initial, coarse_cfg.grid, coarse_cfg.friction));
    }

    FluidState at(const SimConfig& cfg, long step, double t) const {
        if (spec_.exact) return spec_.exact(cfg, t);
        require(step >= 0 && static_cast<std::size_t>(step) < states_.size(), "reference step out of range");
        FluidState s = states_[static_cast<std::size_t>(step)];
        s.t = t;
        return s;
    }

private:
    const ScenarioSpec& spec_;
    std::vector<FluidState> states_;
};

struct Member {
    double nu = 0.0;
    double err_u = 0.0;
    double err_rho = 0.0;
    BoundReport report;
    double seconds = 0.0;
};

Member evaluate_member(const ScenarioSpec& spec, RunSettings settings, double nu, const Reference& ref) {
    const auto t0 = std::chrono::steady_clock::now();
    settings.viscosity = nu;
    const SimConfig cfg = make_config(spec, settings);
    const double dt = cfg.effective_dt();
    FluidState state = scenario_initial_state(spec, cfg);
    BoundAccumulator acc(nu);
    acc.set_initial(ref.at(cfg, 0, state.t), state);
    FluidState r = ref.at(cfg, 0, state.t);
    for (long k = 1; k <= cfg.step_count(); ++k) {
        try {
            state = step(state, cfg, dt);
        } catch (const SolverError& e) {
            throw SolverError("nu = " + format_double(nu) + ", step " + std::to_string(k) + ": " + e.what());
        }
        r = ref.at(cfg, k, state.t);
        acc.add(state, r, dt);
    }
    Member m;
    m.nu = nu;
    FaceField du = state.u;
    for (std::size_t k = 0; k < du.x.raw().size(); ++k) du.x.raw()[k] -= r.u.x.raw()[k];
    for (std::size_t k = 0; k < du.y.raw().size(); ++k) du.y.raw()[k] -= r.u.y.raw()[k];
    ScalarField dr(cfg.grid);
    for (int j = 0; j < cfg.grid.ny; ++j)
        for (int i = 0; i < cfg.grid.nx; ++i) dr(i, j) = state.rho(i, j) - r.rho(i, j);
    m.err_u = face_l2(du);
    m.err_rho = cell_l2(dr);
    m.report = acc.report();
    m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return m;
}

std::string fingerprint(const ScenarioSpec& spec, const RunSettings& s) {
    std::ostringstream o;
    o << spec.name << ';' << s.nx << ';' << s.ny << ';' << format_double(s.lx) << ';' << format_double(s.ly) << ';'
      << format_double(s.friction) << ';' << (s.diffusivity ? format_double(*s.diffusivity) : "auto") << ';'
      << format_double(s.density_floor) << ';' << to_string(s.flux_mode) << ';' << s.implicit_diffusion << ';'
      << s.eps_compensation << ';' << s.smoothing << ';' << format_double(s.dt) << ';' << format_double(s.t_end)
      << ';' << format_double(s.poisson_tol) << ';' << format_double(s.viscous_tol) << ';' << s.max_iterations;
    return o.str();
}

nlohmann::json to_json(const Member& m) {
    return {{"nu", m.nu},
            {"err_u_l2", m.err_u},
            {"err_rho_l2", m.err_rho},
            {"t", m.report.t},
            {"lhs", m.report.lhs},
            {"data_term", m.report.data_term},
            {"visc_term", m.report.visc_term},
            {"forcing_term", m.report.forcing_term},
            {"lhs_monotone_in_t", m.report.lhs_monotone_in_t},
            {"seconds", m.seconds}};
}

Member from_json(const nlohmann::json& j) {
    Member m;
    m.nu = j.at("nu").get<double>();
    m.err_u = j.at("err_u_l2").get<double>();
    m.err_rho = j.at("err_rho_l2").get<double>();
    m.report.viscosity = m.nu;
    m.report.t = j.at("t").get<double>();
    m.report.lhs = j.at("lhs").get<double>();
    m.report.data_term = j.at("data_term").get<double>();
    m.report.visc_term = j.at("visc_term").get<double>();
    m.report.forcing_term = j.at("forcing_term").get<double>();
    m.report.lhs_monotone_in_t = j.at("lhs_monotone_in_t").get<bool>();
    m.seconds = j.at("seconds").get<double>();
    return m;
}

void write_text_atomically(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp);
        require(static_cast<bool>(out), "cannot write '" + tmp + "'");
        out << text;
    }
    fs::rename(tmp, path);
}

/// Rows for a completed prefix; row k only depends on members 0..k.
std::vector<SweepRow> build_rows(const std::vector<Member>& members, std::vector<BoundReport>& reports) {
    std::vector<SweepRow> rows;
    for (std::size_t m = 0; m < members.size(); ++m) {
        std::vector<BoundReport> prefix(reports.begin(), reports.begin() + static_cast<long>(m) + 1);
        double c = std::numeric_limits<double>::quiet_NaN();
        try {
            c = fit_bound_constant(prefix);
        } catch (const SolverError&) {
        }
        double slope = std::numeric_limits<double>::quiet_NaN();
        if (m >= 1) {
            std::vector<std::pair<double, double>> pts;
            for (std::size_t q = 0; q <= m; ++q) pts.emplace_back(members[q].nu, members[q].err_u);
            try {
                slope = fit_rate(pts).slope;
            } catch (const SolverError&) {
            }
        }
        SweepRow row;
        row.nu = members[m].nu;
        row.err_u_l2 = members[m].err_u;
        row.err_rho_l2 = members[m].err_rho;
        row.lhs = members[m].report.lhs;
        row.visc_term = members[m].report.visc_term;
        row.fitted_C = c;
        row.slope_running = slope;
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream o;
    o << "nu,err_u_l2,err_rho_l2,lhs,visc_term,fitted_C,slope_running\n";
    for (const SweepRow& r : rows)
        o << format_double(r.nu) << ',' << format_double(r.err_u_l2) << ',' << format_double(r.err_rho_l2) << ','
          << format_double(r.lhs) << ',' << format_double(r.visc_term) << ',' << format_double(r.fitted_C) << ','
          << format_double(r.slope_running) << '\n';
    return o.str();
}

} // namespace

SweepResult sweep(const ScenarioSpec& spec, const RunSettings& settings, std::vector<double> nus,
                  const SweepOptions& options) {
    std::sort(nus.begin(), nus.end(), std::greater<>());
    for (std::size_t k = 1; k < nus.size(); ++k)
        require(nus[k] != nus[k - 1], "sweep: duplicate viscosity " + format_double(nus[k]));
    require(nus.size() >= 3, "sweep: need at least three viscosities");
    require(nus.back() > 0.0, "sweep: viscosities must be positive");
    require(std::log10(nus.front() / nus.back()) >= 1.5 - 1e-12, "sweep: viscosities must span at least 1.5 decades");

    SweepResult result;
    result.scenario = spec.name;
    result.viscosities = nus;

    // Resume from the sidecar when it was produced by the same settings.
    std::vector<Member> done;
    const std::string fp = fingerprint(spec, settings);
    const std::string sidecar = options.out_dir.empty() ? "" : options.out_dir + "/sweep_members.json";
    if (!options.out_dir.empty()) {
        fs::create_directories(options.out_dir);
        std::ifstream in(sidecar);
        if (in) {
            nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
            if (!j.is_discarded() && j.value("fingerprint", "") == fp && j.contains("members")) {
                for (const auto& item : j["members"]) {
                    if (done.size() >= nus.size()) break;
                    Member m = from_json(item);
                    if (m.nu != nus[done.size()]) break;
                    done.push_back(m);
                }
            }
        }
    }
    result.resumed_members = static_cast<int>(done.size());

    std::mutex mu;
    std::condition_variable cv;
    std::vector<std::optional<Member>> slots(nus.size());
    for (std::size_t k = 0; k < done.size(); ++k) slots[k] = done[k];
    std::atomic<std::size_t> next{done.size()};
    std::atomic<bool> failed{false};
    std::string failure;

    auto persist = [&](const std::vector<Member>& prefix) {
        std::vector<BoundReport> reports;
        for (const Member& m : prefix) reports.push_back(m.report);
        std::vector<SweepRow> rows = build_rows(prefix, reports);
        if (!options.out_dir.empty()) {
            nlohmann::json j;
            j["fingerprint"] = fp;
            j["scenario"] = spec.name;
            j["members"] = nlohmann::json::array();
            for (const Member& m : prefix) j["members"].push_back(to_json(m));
            write_text_atomically(sidecar, j.dump(1));
            write_text_atomically(options.out_dir + "/sweep.csv", sweep_csv(rows));
        }
        return rows;
    };

    // Reference built once; the exact-solution case costs nothing here.
    std::unique_ptr<Reference> reference;
    try {
        reference = std::make_unique<Reference>(spec, settings, nus.back() / 10.0);
    } catch (const SolverError& e) {
        throw SolverError(std::string("sweep reference run failed: ") + e.what());
    }

    int workers = options.deterministic ? 1 : options.workers;
    if (workers <= 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<int>(workers, static_cast<int>(nus.size() - done.size()));

    auto worker = [&]() {
        while (!failed.load()) {
            const std::size_t k = next.fetch_add(1);
            if (k >= nus.size()) return;
            try {
                Member m = evaluate_member(spec, settings, nus[k], *reference);
                std::lock_guard<std::mutex> lock(mu);
                slots[k] = std::move(m);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failed.exchange(true)) failure = e.what();
            }
            cv.notify_all();
        }
    };

    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);

    // Emit rows as the in-order prefix grows.
    std::size_t emitted = done.size();
    std::vector<Member> prefix = done;
    std::exception_ptr emit_error;
    try {
        if (!prefix.empty()) persist(prefix);
        std::unique_lock<std::mutex> lock(mu);
        while (emitted < nus.size()) {
            cv.wait(lock, [&] { return failed.load() || (emitted < nus.size() && slots[emitted].has_value()); });
            while (emitted < nus.size() && slots[emitted].has_value()) {
                prefix.push_back(*slots[emitted]);
                ++emitted;
                lock.unlock();
                const std::vector<SweepRow> rows = persist(prefix);
                if (options.on_row) options.on_row(rows.back());
                lock.lock();
            }
            if (failed.load()) break;
        }
    } catch (...) {
        emit_error = std::current_exception();
        failed.store(true);
    }
    for (auto& t : pool) t.join();
    if (emit_error) std::rethrow_exception(emit_error);
    if (failed.load()) throw SolverError("sweep aborted (" + std::to_string(prefix.size()) + " of " +
                                         std::to_string(nus.size()) + " members kept): " + failure);

    for (const Member& m : prefix) {
        result.reports.push_back(m.report);
        result.wall_seconds.push_back(m.seconds);
        result.lhs_monotone_in_t = result.lhs_monotone_in_t && m.report.lhs_monotone_in_t;
    }
    result.rows = build_rows(prefix, result.reports);
    try {
        fit_bound_constant(result.reports);
    } catch (const SolverError& e) {
        for (BoundReport& b : result.reports) b.fitted_C = std::numeric_limits<double>::quiet_NaN();
        result.fit_note = std::string("bound constant undefined: ") + e.what() + "; ";
    }
    for (std::size_t k = 0; k < result.reports.size(); ++k) {
        result.any_violation = result.any_violation || result.reports[k].violation;
        if (k > 0 && result.reports[k].lhs > result.reports[k - 1].lhs) result.lhs_monotone_in_nu = false;
    }
    std::vector<std::pair<double, double>> pts;
    for (const SweepRow& r : result.rows) pts.emplace_back(r.nu, r.err_u_l2);
    try {
        result.fit = fit_rate(pts);
    } catch (const SolverError& e) {
        result.fit_note += std::string("rate fit rejected: ") + e.what();
    }
    return result;
}

} // namespace navslip
