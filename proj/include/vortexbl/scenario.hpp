#pragma once

/// Preset scenarios and run orchestration: artifact emission (scalar series,
/// wall-profile history, snapshots, checkpoints), resume, event assembly
/// from the stored artifacts, expected-event verification, the epsilon
/// calibration study, and the rescaled budget comparison table.

#include <string>
#include <vector>

#include "vortexbl/config.hpp"
#include "vortexbl/events.hpp"
#include "vortexbl/navier_stokes.hpp"
#include "vortexbl/prandtl.hpp"
#include "vortexbl/snapshot.hpp"

namespace vbl {

/// Acceptance window for one expected event.  NaN bounds are unchecked;
/// metadata_substr = "" matches any metadata.  A forbidden row asserts that
/// no matching event occurs inside the window.
struct ExpectedEvent {
    EventKind kind = EventKind::recirculation_onset;
    double t_lo = 0.0, t_hi = 0.0;
    double x_lo = std::numeric_limits<double>::quiet_NaN();
    double x_hi = std::numeric_limits<double>::quiet_NaN();
    double y_lo = std::numeric_limits<double>::quiet_NaN();
    double y_hi = std::numeric_limits<double>::quiet_NaN();
    std::string metadata_substr;
    bool forbidden = false;
};

struct OutputSchedule {
    double series_every = 0.0025;   ///< scalar + wall-profile cadence (time)
    double snapshot_every = 0.05;   ///< full-field cadence (time)
    double checkpoint_every = 0.0;  ///< checkpoint.bin cadence (time); 0 = off
};

/// Search window for near-wall stagnation points.  The y ceiling keeps the
/// main vortex center (at height 1 in NS variables) out of the scan.
struct StagnationWindow {
    double x_lo = -1.5, x_hi = 1.5;
    double y_lo = 1e-9, y_hi = 0.5;
};

struct Scenario {
    std::string name = "custom";
    SolverKind kind = SolverKind::prandtl;
    PrandtlConfig prandtl;
    NSConfig ns;
    OutputSchedule output;
    StagnationWindow stagnation;
    EventConfig events;
    std::vector<ExpectedEvent> expected;
};

std::vector<std::string> preset_names();

/// Built-in presets: prandtl-baseline, ns-re1e3, ns-re1e4, ns-re1e5.
/// NS presets carry the published computational parameters with grids
/// divided by 4 per axis and dt scaled up by 4 (same Courant ratio);
/// ns-re1e5 is a reference configuration with no expected-event table.
/// Throws std::invalid_argument on an unknown name.
Scenario preset_scenario(const std::string& name);

/// Overlay a parsed config file onto a scenario; unknown sections or keys
/// raise ConfigError with file:line.
void apply_config(Scenario& sc, const Config& cfg);

struct RunResult {
    double t = 0.0;
    long steps = 0;
    PrandtlStop stop = PrandtlStop::time_end;  ///< NS runs end at time_end
    GradientProbe final_probe;                 ///< last gradient probe (Prandtl)
    EventTimeline timeline;
};

/// Run a scenario, writing series.csv, walls.bin, snap_*.bin, snap_final.bin,
/// optional checkpoint.bin, and events.csv under out_dir.  resume_path names
/// a snapshot whose solver parameters override the scenario's.  The timeline
/// is assembled by re-loading the just-written artifacts, so it matches a
/// later `events` invocation on the same directory exactly.
RunResult run_scenario(const Scenario& sc, const std::string& out_dir,
                       const std::string& resume_path = "", bool quiet = false);

/// Assemble the timeline from a run directory (series.csv, walls.bin if
/// present, vorticity snapshots for core tracking).
EventTimeline events_from_artifacts(const std::string& dir, const EventConfig& cfg);

/// One human-readable line per expected-event mismatch; empty means pass.
std::vector<std::string> check_expected(const EventTimeline& tl,
                                        const std::vector<ExpectedEvent>& expected);

/// Regularized-start calibration: for each eps, run the pair (eps, eps/2) on
/// the given base configuration and find the least-squares time shift
/// aligning the wall-shear histories at probe_x.  The shift inherits the
/// eps-power of the underlying time offset, so slope estimates its exponent.
struct EpsilonCalibration {
    std::vector<double> eps;
    std::vector<double> delta_t;
    double slope = 0.0;  ///< d log(delta_t) / d log(eps), least squares
};
EpsilonCalibration calibrate_epsilon(PrandtlConfig base, std::vector<double> eps_values,
                                     double probe_x, double t_end, bool quiet = true);

/// Rescaled NS budgets against the boundary-layer analogues, one row per NS
/// series row (columns interpolated from the Prandtl series; NaN where the
/// Prandtl run has already ended).
void write_compare_csv(const std::string& prandtl_dir, const std::string& ns_dir,
                       const std::string& out_path);

}  // namespace vbl
