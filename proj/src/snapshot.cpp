#include "vortexbl/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vbl {

namespace {

constexpr char kMagic[8] = {'V', 'B', 'L', 'S', 'N', 'A', 'P', '1'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr int kNameBytes = 16;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

void put_i64(std::ostream& os, std::int64_t v) {
    const auto u = static_cast<std::uint64_t>(v);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::int64_t get_i64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return static_cast<std::int64_t>(u);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

void put_name(std::ostream& os, const std::string& name) {
    if (name.size() >= kNameBytes)
        throw std::runtime_error("snapshot: name too long: " + name);
    char buf[kNameBytes] = {};
    std::memcpy(buf, name.data(), name.size());
    os.write(buf, kNameBytes);
}

std::string get_name(std::istream& is) {
    char buf[kNameBytes];
    is.read(buf, kNameBytes);
    buf[kNameBytes - 1] = '\0';
    return std::string(buf);
}

void put_array(std::ostream& os, const ArrayXd& a) {
    for (int i = 0; i < a.size(); ++i) put_f64(os, a[i]);
}

ArrayXd get_array(std::istream& is, int n) {
    ArrayXd a(n);
    for (int i = 0; i < n; ++i) a[i] = get_f64(is);
    return a;
}

void put_axis(std::ostream& os, const MappedAxis& ax) {
    put_u32(os, static_cast<std::uint32_t>(ax.kind));
    put_f64(os, ax.dcomp);
    put_array(os, ax.comp);
    put_array(os, ax.phys);
    put_array(os, ax.d1);
    put_array(os, ax.d2);
    put_array(os, ax.qw);
}

MappedAxis get_axis(std::istream& is, int n) {
    MappedAxis ax;
    ax.kind = static_cast<AxisKind>(get_u32(is));
    ax.dcomp = get_f64(is);
    ax.comp = get_array(is, n);
    ax.phys = get_array(is, n);
    ax.d1 = get_array(is, n);
    ax.d2 = get_array(is, n);
    ax.qw = get_array(is, n);
    return ax;
}

void put_field(std::ostream& os, const ArrayXXd& f) {
    for (int j = 0; j < f.rows(); ++j)
        for (int i = 0; i < f.cols(); ++i) put_f64(os, f(j, i));
}

ArrayXXd get_field(std::istream& is, int ny, int nx) {
    ArrayXXd f(ny, nx);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) f(j, i) = get_f64(is);
    return f;
}

}  // namespace

const char* solver_kind_name(SolverKind k) {
    return k == SolverKind::prandtl ? "prandtl" : "ns";
}

bool Snapshot::has_param(const std::string& name) const {
    for (const auto& p : params)
        if (p.first == name) return true;
    return false;
}

double Snapshot::param(const std::string& name) const {
    for (const auto& p : params)
        if (p.first == name) return p.second;
    throw std::runtime_error("snapshot: missing parameter '" + name + "'");
}

double Snapshot::param_or(const std::string& name, double fallback) const {
    for (const auto& p : params)
        if (p.first == name) return p.second;
    return fallback;
}

void Snapshot::set_param(const std::string& name, double value) {
    for (auto& p : params)
        if (p.first == name) {
            p.second = value;
            return;
        }
    params.emplace_back(name, value);
}

bool Snapshot::has_field(const std::string& name) const {
    for (const auto& f : fields)
        if (f.first == name) return true;
    return false;
}

const ArrayXXd& Snapshot::field(const std::string& name) const {
    for (const auto& f : fields)
        if (f.first == name) return f.second;
    throw std::runtime_error("snapshot: missing field '" + name + "'");
}

void write_snapshot(const std::string& path, const Snapshot& s) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("snapshot: cannot open for writing: " + path);
    os.write(kMagic, 8);
    put_u32(os, kFormatVersion);
    put_u32(os, static_cast<std::uint32_t>(s.kind));
    put_f64(os, s.t);
    put_i64(os, s.step);
    put_u32(os, static_cast<std::uint32_t>(s.nx));
    put_u32(os, static_cast<std::uint32_t>(s.ny));
    put_u32(os, static_cast<std::uint32_t>(s.params.size()));
    for (const auto& p : s.params) {
        put_name(os, p.first);
        put_f64(os, p.second);
    }
    if (s.ax.n() != s.nx || s.ay.n() != s.ny)
        throw std::runtime_error("snapshot: axis sizes disagree with nx/ny");
    put_axis(os, s.ax);
    put_axis(os, s.ay);
    put_u32(os, static_cast<std::uint32_t>(s.fields.size()));
    for (const auto& f : s.fields) {
        if (f.second.rows() != s.ny || f.second.cols() != s.nx)
            throw std::runtime_error("snapshot: field '" + f.first + "' shape disagrees with nx/ny");
        put_name(os, f.first);
        put_field(os, f.second);
    }
    os.flush();
    if (!os) throw std::runtime_error("snapshot: write failed: " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("snapshot: bad magic in " + path);
    const std::uint32_t version = get_u32(is);
    if (version != kFormatVersion)
        throw std::runtime_error("snapshot: " + path + " has format version " +
                                 std::to_string(version) + ", this reader supports version " +
                                 std::to_string(kFormatVersion));
    Snapshot s;
    s.kind = static_cast<SolverKind>(get_u32(is));
    s.t = get_f64(is);
    s.step = static_cast<long>(get_i64(is));
    s.nx = static_cast<int>(get_u32(is));
    s.ny = static_cast<int>(get_u32(is));
    if (s.nx < 3 || s.ny < 3 || s.nx > (1 << 24) || s.ny > (1 << 24))
        throw std::runtime_error("snapshot: implausible grid size in " + path);
    const std::uint32_t np = get_u32(is);
    s.params.reserve(np);
    for (std::uint32_t p = 0; p < np; ++p) {
        std::string name = get_name(is);
        double value = get_f64(is);
        s.params.emplace_back(std::move(name), value);
    }
    s.ax = get_axis(is, s.nx);
    s.ay = get_axis(is, s.ny);
    const std::uint32_t nf = get_u32(is);
    s.fields.reserve(nf);
    for (std::uint32_t f = 0; f < nf; ++f) {
        std::string name = get_name(is);
        s.fields.emplace_back(std::move(name), get_field(is, s.ny, s.nx));
    }
    if (!is) throw std::runtime_error("snapshot: truncated file: " + path);
    return s;
}

}  // namespace vbl
