/// Command-line front end: run the boundary-layer or Navier-Stokes solver,
/// compute diagnostics on stored snapshots, assemble event timelines, compare
/// matched runs, and verify preset scenarios against their expected-event
/// tables.
///
/// Exit codes: 0 success, 1 usage or configuration error, 2 numerical or I/O
/// failure, 3 verification mismatch.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "vortexbl/config.hpp"
#include "vortexbl/diagnostics.hpp"
#include "vortexbl/euler.hpp"
#include "vortexbl/scenario.hpp"
#include "vortexbl/series.hpp"
#include "vortexbl/snapshot.hpp"

namespace {

namespace fs = std::filesystem;
using namespace vbl;

struct RunOpts {
    std::string config_path;
    std::string out;
    std::string resume;
    double re = 0.0;
    double dt = 0.0;
    double t_end = 0.0;
    double checkpoint_every = 0.0;
    std::vector<int> grid;
    int threads = 1;
    bool quiet = false;
};

void add_run_flags(CLI::App* cmd, RunOpts& o) {
    cmd->add_option("--config", o.config_path, "configuration file (key = value with [sections])");
    cmd->add_option("--re", o.re, "Reynolds number (ns runs)");
    cmd->add_option("--grid", o.grid, "grid sizes: NX NY")->expected(2);
    cmd->add_option("--dt", o.dt, "time step (ns) or time-step ceiling (prandtl)");
    cmd->add_option("--t-end", o.t_end, "final time");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--checkpoint-every", o.checkpoint_every,
                    "checkpoint cadence in time units (0 = off)");
    cmd->add_option("--resume", o.resume, "snapshot file to resume from");
    cmd->add_option("--threads", o.threads, "worker threads (this build computes serially)")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--quiet", o.quiet, "suppress progress output");
}

void apply_run_flags(Scenario& sc, const RunOpts& o) {
    if (!o.config_path.empty()) apply_config(sc, Config::parse_file(o.config_path));
    if (o.grid.size() == 2) {
        if (sc.kind == SolverKind::prandtl) {
            sc.prandtl.nx = o.grid[0];
            sc.prandtl.ny = o.grid[1];
        } else {
            sc.ns.nx = o.grid[0];
            sc.ns.ny = o.grid[1];
        }
    }
    if (o.re > 0.0) sc.ns.re = o.re;
    if (o.dt > 0.0) {
        if (sc.kind == SolverKind::prandtl) sc.prandtl.dt_max = o.dt;
        else sc.ns.dt = o.dt;
    }
    if (o.t_end > 0.0) {
        sc.prandtl.t_end = o.t_end;
        sc.ns.t_end = o.t_end;
    }
    if (o.checkpoint_every > 0.0) sc.output.checkpoint_every = o.checkpoint_every;
}

int do_run(SolverKind kind, const RunOpts& o) {
    Scenario sc = preset_scenario(kind == SolverKind::prandtl ? "prandtl-baseline" : "ns-re1e3");
    sc.kind = kind;
    apply_run_flags(sc, o);
    const std::string out = o.out.empty() ? std::string("out-") + solver_kind_name(kind) : o.out;
    const RunResult res = run_scenario(sc, out, o.resume, o.quiet);
    if (!o.quiet)
        std::cout << "artifacts in " << out << " (events.csv: " << res.timeline.events.size()
                  << " events)" << std::endl;
    return 0;
}

int do_diag(const std::vector<std::string>& paths, bool quiet) {
    for (const auto& path : paths) {
        const Snapshot sn = read_snapshot(path);
        const ArrayXd& x = sn.ax.phys;
        ArrayXd tau, aux;
        std::string aux_name;
        if (sn.kind == SolverKind::ns) {
            tau = wall_shear_ns(sn.field("omega"), sn.param("re"));
            aux = wall_pressure_gradient(sn.field("omega"), sn.ay, sn.param("re"));
            aux_name = "dpdx_w";
        } else {
            ArrayXd uinf(sn.nx);
            for (int i = 0; i < sn.nx; ++i) uinf[i] = freestream_velocity(x[i]);
            tau = wall_shear_prandtl(sn.field("u"), sn.ay);
            aux = displacement_thickness(sn.field("u"), sn.ay, uinf);
            aux_name = "delta_star";
        }
        std::string out = path;
        if (out.size() > 4 && out.compare(out.size() - 4, 4, ".bin") == 0)
            out.resize(out.size() - 4);
        out += ".diag.csv";
        std::ofstream os(out, std::ios::trunc);
        if (!os) throw std::runtime_error("diag: cannot open for writing: " + out);
        os << "x,tau," << aux_name << '\n';
        for (int i = 0; i < sn.nx; ++i)
            os << format_full(x[i]) << ',' << format_full(tau[i]) << ',' << format_full(aux[i])
               << '\n';
        if (!os) throw std::runtime_error("diag: write failed: " + out);

        const double y_top = sn.kind == SolverKind::ns ? 0.5 : 2.0;
        const auto stags =
            find_stagnation_points(sn.field("u"), sn.field("v"), sn.ax.phys, sn.ay.phys, -1.5,
                                   1.5, 1e-9, y_top);
        int centers = 0;
        for (const auto& p : stags) centers += p.is_center ? 1 : 0;
        int imin = 0;
        for (int i = 1; i < sn.nx; ++i)
            if (tau[i] < tau[imin]) imin = i;
        if (!quiet)
            std::cout << path << ": " << solver_kind_name(sn.kind) << " t=" << sn.t
                      << " min tau=" << tau[imin] << " at x=" << x[imin]
                      << ", stagnation points=" << stags.size() << " (centers=" << centers
                      << ") -> " << out << std::endl;
    }
    return 0;
}

int do_events(const std::string& series_path, const std::string& config_path,
              const std::string& out_path) {
    std::string dir = series_path;
    if (!fs::is_directory(dir)) dir = fs::path(series_path).parent_path().string();
    if (dir.empty()) dir = ".";
    EventConfig ecfg;
    if (!config_path.empty()) {
        Scenario scratch;
        apply_config(scratch, Config::parse_file(config_path));
        ecfg = scratch.events;
    }
    const EventTimeline tl = events_from_artifacts(dir, ecfg);
    if (!out_path.empty()) write_events_csv(out_path, tl);
    for (const auto& e : tl.events) {
        std::cout << event_kind_name(e.kind) << " t=" << e.t;
        if (std::isfinite(e.x)) std::cout << " x=" << e.x;
        if (std::isfinite(e.y)) std::cout << " y=" << e.y;
        if (!e.metadata.empty()) std::cout << " (" << e.metadata << ")";
        std::cout << '\n';
    }
    std::cout << tl.events.size() << " events" << std::endl;
    return 0;
}

int do_compare(const std::string& prandtl_dir, const std::string& ns_dir,
               const std::string& out_path) {
    const std::string out = out_path.empty() ? ns_dir + "/compare.csv" : out_path;
    write_compare_csv(prandtl_dir, ns_dir, out);
    std::cout << "budget overlay written to " << out << std::endl;
    return 0;
}

int do_verify(const std::string& name, const RunOpts& o) {
    Scenario sc = preset_scenario(name);
    apply_run_flags(sc, o);
    const std::string out = o.out.empty() ? "verify-" + name : o.out;
    const RunResult res = run_scenario(sc, out, "", o.quiet);
    const std::vector<std::string> mismatches = check_expected(res.timeline, sc.expected);
    std::cout << "scenario " << name << ": " << res.timeline.events.size() << " events, "
              << sc.expected.size() << " expectations" << std::endl;
    for (const auto& m : mismatches) std::cout << "  MISMATCH: " << m << std::endl;
    if (mismatches.empty()) {
        std::cout << "verify " << name << ": PASS" << std::endl;
        return 0;
    }
    std::cout << "verify " << name << ": FAIL (" << mismatches.size() << " mismatches)"
              << std::endl;
    return 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"boundary-layer and Navier-Stokes separation solvers for a vortex above a "
                 "moving wall"};
    app.require_subcommand(1);

    RunOpts prandtl_opts, ns_opts, verify_opts;

    CLI::App* prandtl = app.add_subcommand("prandtl", "boundary-layer solver");
    prandtl->require_subcommand(1);
    CLI::App* prandtl_run = prandtl->add_subcommand("run", "run from the baseline preset");
    add_run_flags(prandtl_run, prandtl_opts);

    CLI::App* ns = app.add_subcommand("ns", "Navier-Stokes solver");
    ns->require_subcommand(1);
    CLI::App* ns_run = ns->add_subcommand("run", "run from the ns-re1e3 preset");
    add_run_flags(ns_run, ns_opts);

    std::vector<std::string> diag_paths;
    bool diag_quiet = false;
    CLI::App* diag = app.add_subcommand("diag", "wall profiles and stagnation summary from snapshots");
    diag->add_option("snapshots", diag_paths, "snapshot files")->required()->expected(-1);
    diag->add_flag("--quiet", diag_quiet, "suppress per-snapshot summaries");

    std::string events_path, events_config, events_out;
    CLI::App* events = app.add_subcommand("events", "assemble the event timeline from artifacts");
    events->add_option("series", events_path, "series.csv or its run directory")->required();
    events->add_option("--config", events_config, "configuration file ([events] thresholds)");
    events->add_option("--out", events_out, "also write the timeline as CSV");

    std::string cmp_prandtl, cmp_ns, cmp_out;
    CLI::App* compare = app.add_subcommand("compare", "rescaled budget overlay of matched runs");
    compare->add_option("prandtl-dir", cmp_prandtl, "boundary-layer run directory")->required();
    compare->add_option("ns-dir", cmp_ns, "Navier-Stokes run directory")->required();
    compare->add_option("--out", cmp_out, "output CSV path (default <ns-dir>/compare.csv)");

    std::string verify_name;
    CLI::App* verify = app.add_subcommand("verify", "run a preset and check its event table");
    verify->add_option("scenario", verify_name, "preset name")->required();
    add_run_flags(verify, verify_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (prandtl_run->parsed()) return do_run(SolverKind::prandtl, prandtl_opts);
        if (ns_run->parsed()) return do_run(SolverKind::ns, ns_opts);
        if (diag->parsed()) return do_diag(diag_paths, diag_quiet);
        if (events->parsed()) return do_events(events_path, events_config, events_out);
        if (compare->parsed()) return do_compare(cmp_prandtl, cmp_ns, cmp_out);
        if (verify->parsed()) return do_verify(verify_name, verify_opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 1;
}
