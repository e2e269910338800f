/// @file navslip_cli.cpp
/// @brief Command-line front end: run, sweep, verify, scenarios.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "navslip/config.hpp"
#include "navslip/error.hpp"
#include "navslip/experiments.hpp"
#include "navslip/verify.hpp"

using namespace navslip;

namespace {

RunSettings settings_for(const ScenarioSpec& spec, const std::string& config_path) {
    return config_path.empty() ? spec.defaults : load_settings(config_path, spec.defaults);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        require(used > 0 && item.find_first_not_of(" \t", used) == std::string::npos,
                "--nu: cannot parse '" + item + "'");
        out.push_back(v);
    }
    return out;
}

int cmd_run(const std::string& name, const std::string& config_path, const std::string& out_dir) {
    const ScenarioSpec spec = scenario(name);
    const RunSettings st = settings_for(spec, config_path);
    const SimConfig cfg = make_config(spec, st);
    RunOptions opts;
    opts.out_dir = out_dir;
    opts.snapshot_every = st.snapshot_every;
    const RunResult r = run(spec, cfg, opts);
    const EnergyLedger& last = r.ledger.back();
    std::printf("%s: %ld steps to t = %.6g in %.2f s\n", name.c_str(), r.steps, r.final_state.t, r.seconds);
    std::printf("  kinetic %.6e -> %.6e, energy residual %.3e\n", last.kinetic_initial, last.kinetic,
                energy_residual(last));
    std::printf("  mass drift %.3e, density range [%.6g, %.6g]\n", r.max_mass_drift, r.rho_min, r.rho_max);
    std::printf("  wrote %s/ledger.csv\n", out_dir.c_str());
    return 0;
}

int cmd_sweep(const std::string& name, const std::string& nu_list, const std::string& config_path,
              const std::string& out_dir, int workers, bool deterministic) {
    const ScenarioSpec spec = scenario(name);
    SweepOptions opts;
    opts.out_dir = out_dir;
    opts.workers = workers;
    opts.deterministic = deterministic;
    opts.on_row = [](const SweepRow& row) {
        std::printf("  nu %-10.4g err_u %.6e  err_rho %.6e  lhs %.6e  visc %.6e\n", row.nu, row.err_u_l2,
                    row.err_rho_l2, row.lhs, row.visc_term);
        std::fflush(stdout);
    };
    const SweepResult r = sweep(spec, settings_for(spec, config_path), parse_list(nu_list), opts);
    if (r.resumed_members > 0) std::printf("  (%d members resumed from %s)\n", r.resumed_members, out_dir.c_str());
    if (r.fit)
        std::printf("rate fit: slope %.4f, r2 %.4f\n", r.fit->slope, r.fit->r_squared);
    else
        std::printf("%s\n", r.fit_note.c_str());
    if (!r.reports.empty()) std::printf("fitted C %.6g%s\n", r.reports.front().fitted_C, r.any_violation ? " (violations)" : "");
    if (!r.lhs_monotone_in_t) std::printf("finding: lhs(t) is not monotone for some member\n");
    if (!r.lhs_monotone_in_nu) std::printf("finding: lhs is not monotone in nu\n");
    std::printf("wrote %s/sweep.csv\n", out_dir.c_str());
    return 0;
}

int cmd_verify(const std::string& suite, bool deterministic) {
    const std::vector<CheckResult> results = run_suite(suite, deterministic);
    bool ok = true;
    for (const CheckResult& c : results) {
        ok = ok && c.passed;
        const std::string tag = c.id > 0 ? "[" + std::to_string(c.id) + "] " : "[-] ";
        std::printf("%s %s%s (%.1f s): %s\n", c.passed ? "PASS" : "FAIL", tag.c_str(), c.name.c_str(), c.seconds,
                    c.detail.c_str());
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variable-density Navier-Stokes with Navier slip: runs, sweeps and verification"};
    app.require_subcommand(1);
    bool deterministic = false;
    app.add_flag("--deterministic", deterministic, "Single worker, fixed reduction order");

    std::string name, config_path, out_dir = "out", nu_list, suite = "all";
    int workers = 0;

    auto* run_cmd = app.add_subcommand("run", "Advance one scenario and write ledger.csv");
    run_cmd->add_option("--scenario", name, "Scenario name")->required();
    run_cmd->add_option("--config", config_path, "Settings file")->check(CLI::ExistingFile);
    run_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
    run_cmd->add_flag("--deterministic", deterministic, "Single worker, fixed reduction order");

    auto* sweep_cmd = app.add_subcommand("sweep", "Viscosity sweep against the inviscid reference");
    sweep_cmd->add_option("--scenario", name, "Scenario name")->required();
    sweep_cmd->add_option("--nu", nu_list, "Comma-separated viscosities")->required();
    sweep_cmd->add_option("--config", config_path, "Settings file")->check(CLI::ExistingFile);
    sweep_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sweep_cmd->add_option("--workers", workers, "Concurrent members (0: all cores)")->check(CLI::NonNegativeNumber);
    sweep_cmd->add_flag("--deterministic", deterministic, "Single worker, fixed reduction order");

    auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suites; nonzero exit on failure");
    verify_cmd->add_option("--suite", suite, "identities, energy, rates or all")
        ->check(CLI::IsMember({"identities", "energy", "rates", "all"}))
        ->capture_default_str();
    verify_cmd->add_flag("--deterministic", deterministic, "Single worker, fixed reduction order");

    auto* list_cmd = app.add_subcommand("scenarios", "List the shipped scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(name, config_path, out_dir);
        if (sweep_cmd->parsed()) return cmd_sweep(name, nu_list, config_path, out_dir, workers, deterministic);
        if (verify_cmd->parsed()) return cmd_verify(suite, deterministic);
        if (list_cmd->parsed()) {
            for (const std::string& s : scenario_names()) std::printf("%-22s %s\n", s.c_str(), scenario(s).summary.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
