#pragma once

/// Run artifacts the event detectors consume:
///  - series.csv: scalar diagnostics, header "t,<name>,...", one row per
///    emission, 17-significant-digit floats so a reload is value-exact;
///  - walls.bin: wall-profile history (shear plus a solver-specific
///    companion profile) at the same cadence, raw little-endian doubles;
///  - events.csv: an assembled timeline.

#include <fstream>
#include <string>
#include <vector>

#include "vortexbl/events.hpp"

namespace vbl {

/// Incremental scalar-series writer.
class SeriesWriter {
public:
    SeriesWriter(const std::string& path, const std::vector<std::string>& columns);
    void append(double t, const std::vector<double>& values);
    void flush();

private:
    std::ofstream os_;
    std::size_t ncols_;
    std::string path_;
};

/// Parse a series CSV; throws std::runtime_error with the offending line
/// number on malformed input.
SeriesTable load_series(const std::string& path);

/// Incremental wall-history writer (format: magic "VBLWALL1", version u32,
/// nx u32, aux-kind u32, x array, then per row t + tau + aux).
class WallWriter {
public:
    WallWriter(const std::string& path, const ArrayXd& x, bool aux_is_dpdx);
    void append(double t, const ArrayXd& tau, const ArrayXd& aux);
    void flush();

private:
    std::ofstream os_;
    int nx_;
    std::string path_;
};

WallHistory load_walls(const std::string& path);

void write_events_csv(const std::string& path, const EventTimeline& tl);
EventTimeline load_events_csv(const std::string& path);

/// 17-significant-digit formatting used across all CSV artifacts.
std::string format_full(double v);

}  // namespace vbl
