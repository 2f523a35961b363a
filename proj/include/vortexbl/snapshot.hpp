#pragma once

/// Self-describing binary state files.  One snapshot holds everything needed
/// to resume a run or compute diagnostics offline: solver kind, time, step,
/// named scalar parameters (the full solver configuration), both mapped axes
/// with their metric arrays, and named field arrays.
///
/// Layout (little-endian throughout):
///   magic "VBLSNAP1", format version u32, solver kind u32,
///   t f64, step i64, nx u32, ny u32,
///   param count u32, then (name char[16], value f64) per param,
///   x axis, y axis (kind u32, dcomp f64, comp/phys/d1/d2/qw as f64 arrays),
///   field count u32, then (name char[16], ny*nx f64 row-major) per field.
/// Raw IEEE doubles round-trip bit-exactly by construction.

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "vortexbl/grid.hpp"

namespace vbl {

enum class SolverKind : unsigned { prandtl = 0, ns = 1 };

const char* solver_kind_name(SolverKind k);

struct Snapshot {
    SolverKind kind = SolverKind::prandtl;
    double t = 0.0;
    long step = 0;
    int nx = 0, ny = 0;
    std::vector<std::pair<std::string, double>> params;
    MappedAxis ax, ay;
    std::vector<std::pair<std::string, ArrayXXd>> fields;

    bool has_param(const std::string& name) const;
    double param(const std::string& name) const;             ///< throws if absent
    double param_or(const std::string& name, double fallback) const;
    void set_param(const std::string& name, double value);   ///< add or replace

    bool has_field(const std::string& name) const;
    const ArrayXXd& field(const std::string& name) const;    ///< throws if absent
};

/// Write a snapshot; throws std::runtime_error on I/O failure or if a name
/// exceeds 15 bytes.
void write_snapshot(const std::string& path, const Snapshot& s);

/// Read a snapshot; throws std::runtime_error on I/O failure, bad magic, or
/// version mismatch (the message quotes both the file's and the reader's
/// version).
Snapshot read_snapshot(const std::string& path);

}  // namespace vbl
