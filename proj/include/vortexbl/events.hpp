#pragma once

/// Separation-event timeline assembly. The detectors are pure functions of
/// the stored run artifacts (scalar series, wall profiles, field snapshots),
/// so re-running them on saved outputs reproduces the timeline exactly.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "vortexbl/diagnostics.hpp"
#include "vortexbl/grid.hpp"

namespace vbl {

enum class EventKind {
    recirculation_onset,
    wall_shear_zero,
    inflection_pair,
    local_min_formed,
    min_negative,
    kink,
    spike,
    core_detected,
    enstrophy_peak,
};

const char* event_kind_name(EventKind k);
std::optional<EventKind> event_kind_from_name(const std::string& name);

struct Event {
    EventKind kind = EventKind::recirculation_onset;
    double t = 0.0;
    double x = std::numeric_limits<double>::quiet_NaN();
    double y = std::numeric_limits<double>::quiet_NaN();
    std::string metadata;
};

struct EventTimeline {
    std::vector<Event> events;  ///< time-ordered
};

/// Scalar time series (one row per diagnostic emission).
struct SeriesTable {
    std::vector<std::string> columns;  ///< names, excluding the leading t
    ArrayXd t;
    ArrayXXd data;  ///< (rows, columns.size())

    int col(const std::string& name) const;  ///< -1 when absent
    bool has(const std::string& name) const { return col(name) >= 0; }
    ArrayXd column(const std::string& name) const;
};

/// Wall-profile history: shear plus one solver-specific companion profile
/// (streamwise wall pressure gradient for NS, displacement thickness for
/// Prandtl), stored at the same cadence as the series rows.
struct WallHistory {
    ArrayXd x;
    std::vector<double> t;
    std::vector<ArrayXd> tau;
    std::vector<ArrayXd> aux;
    bool aux_is_dpdx = true;
};

/// Detector thresholds and windows; defaults calibrated on the Re=10^3 desk
/// run and the baseline boundary-layer run.
struct EventConfig {
    int persistence = 2;         ///< rows a binary detection must hold
    int minima_persistence = 3;  ///< rows a tracked minimum must survive
    double shear_lo = -2.0, shear_hi = 2.5;       ///< wall-shear-zero window
    double minima_lo = -1.5, minima_hi = 2.0;     ///< dpdx feature window
    double minima_prominence_rel = 0.02;          ///< x max|dpdx| per profile
    double minima_match_dx = 0.12;                ///< track association radius
    double inflection_lo = 0.05;                  ///< inflection count window start
    double beta_lo = -0.45, beta_hi = 0.15;       ///< displacement-max window
    double beta_prominence_rel = 1e-4;  ///< x max|delta*|; rejects flat-profile noise
    double profile_t_lo = 0.1;  ///< profile detectors skip earlier rows: the
                                ///< impulsively started wall sheet carries its
                                ///< own minima and inflections until viscosity
                                ///< smooths it out
    double kink_factor = 10.0;    ///< curvature rise over baseline
    double spike_factor = 10.0;   ///< max|du/dx| rise over baseline
    double baseline_t = 0.3;      ///< pre-interaction baseline horizon
    double enstrophy_prominence = 0.02;  ///< relative to series range
    double core_rel_threshold = 0.2;     ///< of max|omega| in the window
    double core_x_lo = -1.0, core_x_hi = 1.5;
    double core_y_lo = 0.0, core_y_hi = 0.35;
    double core_max_jump = 0.15;
};

/// Events derivable from the scalar series alone: recirculation onset (from
/// the stagnation columns), wall-shear zero (from the tau-min columns when no
/// wall history is supplied), spike, enstrophy peaks.
/// When `walls` is present it supplies the shear, pressure-gradient and
/// displacement detections at profile fidelity.
EventTimeline assemble_events(const SeriesTable& series, const WallHistory* walls,
                              const EventConfig& cfg = {});

/// Vortex-core birth events from full vorticity snapshots (both polarities).
std::vector<Event> core_events(const std::vector<double>& times,
                               const std::vector<const ArrayXXd*>& omega,
                               const ArrayXd& xphys, const ArrayXd& yphys,
                               const EventConfig& cfg = {});

/// Merge (stable by time) extra events into a timeline.
void merge_events(EventTimeline& tl, const std::vector<Event>& extra);

}  // namespace vbl
