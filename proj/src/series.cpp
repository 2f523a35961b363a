#include "vortexbl/series.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace vbl {

namespace {

constexpr char kWallMagic[8] = {'V', 'B', 'L', 'W', 'A', 'L', 'L', '1'};
constexpr std::uint32_t kWallVersion = 1;

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

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& path, int lineno) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || (end != nullptr && *end != '\0'))
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": not a number: '" + s + "'");
    return v;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SeriesWriter::SeriesWriter(const std::string& path, const std::vector<std::string>& columns)
    : os_(path, std::ios::trunc), ncols_(columns.size()), path_(path) {
    if (!os_) throw std::runtime_error("series: cannot open for writing: " + path);
    os_ << "t";
    for (const auto& c : columns) os_ << ',' << c;
    os_ << '\n';
}

void SeriesWriter::append(double t, const std::vector<double>& values) {
    if (values.size() != ncols_)
        throw std::runtime_error("series: row width mismatch in " + path_);
    os_ << format_full(t);
    for (double v : values) os_ << ',' << format_full(v);
    os_ << '\n';
    if (!os_) throw std::runtime_error("series: write failed: " + path_);
}

void SeriesWriter::flush() { os_.flush(); }

SeriesTable load_series(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("series: cannot open: " + path);
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error(path + ":1: empty series file");
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "t")
        throw std::runtime_error(path + ":1: series header must start with 't'");
    SeriesTable tab;
    tab.columns.assign(header.begin() + 1, header.end());
    std::vector<double> tbuf;
    std::vector<double> dbuf;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(header.size()) + " cells, got " +
                                     std::to_string(cells.size()));
        tbuf.push_back(parse_double(cells[0], path, lineno));
        for (std::size_t c = 1; c < cells.size(); ++c)
            dbuf.push_back(parse_double(cells[c], path, lineno));
    }
    const int rows = static_cast<int>(tbuf.size());
    const int cols = static_cast<int>(tab.columns.size());
    tab.t.resize(rows);
    tab.data.resize(rows, cols);
    for (int r = 0; r < rows; ++r) {
        tab.t[r] = tbuf[r];
        for (int c = 0; c < cols; ++c) tab.data(r, c) = dbuf[static_cast<std::size_t>(r) * cols + c];
    }
    return tab;
}

WallWriter::WallWriter(const std::string& path, const ArrayXd& x, bool aux_is_dpdx)
    : os_(path, std::ios::binary | std::ios::trunc),
      nx_(static_cast<int>(x.size())),
      path_(path) {
    if (!os_) throw std::runtime_error("walls: cannot open for writing: " + path);
    os_.write(kWallMagic, 8);
    put_u32(os_, kWallVersion);
    put_u32(os_, static_cast<std::uint32_t>(nx_));
    put_u32(os_, aux_is_dpdx ? 1 : 0);
    for (int i = 0; i < nx_; ++i) put_f64(os_, x[i]);
}

void WallWriter::append(double t, const ArrayXd& tau, const ArrayXd& aux) {
    if (tau.size() != nx_ || aux.size() != nx_)
        throw std::runtime_error("walls: profile width mismatch in " + path_);
    put_f64(os_, t);
    for (int i = 0; i < nx_; ++i) put_f64(os_, tau[i]);
    for (int i = 0; i < nx_; ++i) put_f64(os_, aux[i]);
    if (!os_) throw std::runtime_error("walls: write failed: " + path_);
}

void WallWriter::flush() { os_.flush(); }

WallHistory load_walls(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("walls: cannot open: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kWallMagic, 8) != 0)
        throw std::runtime_error("walls: bad magic in " + path);
    const std::uint32_t version = get_u32(is);
    if (version != kWallVersion)
        throw std::runtime_error("walls: " + path + " has format version " +
                                 std::to_string(version) + ", this reader supports version " +
                                 std::to_string(kWallVersion));
    const int nx = static_cast<int>(get_u32(is));
    if (nx < 3 || nx > (1 << 24))
        throw std::runtime_error("walls: implausible profile width in " + path);
    WallHistory h;
    h.aux_is_dpdx = get_u32(is) != 0;
    h.x.resize(nx);
    for (int i = 0; i < nx; ++i) h.x[i] = get_f64(is);
    if (!is) throw std::runtime_error("walls: truncated header in " + path);
    while (true) {
        const double t = get_f64(is);
        if (!is) break;  // clean EOF after the last row
        ArrayXd tau(nx), aux(nx);
        for (int i = 0; i < nx; ++i) tau[i] = get_f64(is);
        for (int i = 0; i < nx; ++i) aux[i] = get_f64(is);
        if (!is) throw std::runtime_error("walls: truncated row in " + path);
        h.t.push_back(t);
        h.tau.push_back(std::move(tau));
        h.aux.push_back(std::move(aux));
    }
    return h;
}

void write_events_csv(const std::string& path, const EventTimeline& tl) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("events: cannot open for writing: " + path);
    os << "kind,t,x,y,metadata\n";
    for (const auto& e : tl.events) {
        os << event_kind_name(e.kind) << ',' << format_full(e.t) << ',' << format_full(e.x)
           << ',' << format_full(e.y) << ',' << csv_escape(e.metadata) << '\n';
    }
    if (!os) throw std::runtime_error("events: write failed: " + path);
}

EventTimeline load_events_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("events: cannot open: " + path);
    std::string line;
    if (!std::getline(is, line) || split_csv_line(line) !=
        std::vector<std::string>{"kind", "t", "x", "y", "metadata"})
        throw std::runtime_error(path + ":1: bad events header");
    EventTimeline tl;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 5)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 5 cells, got " + std::to_string(cells.size()));
        Event e;
        const auto kind = event_kind_from_name(cells[0]);
        if (!kind)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": unknown event kind '" + cells[0] + "'");
        e.kind = *kind;
        e.t = parse_double(cells[1], path, lineno);
        e.x = parse_double(cells[2], path, lineno);
        e.y = parse_double(cells[3], path, lineno);
        e.metadata = cells[4];
        tl.events.push_back(std::move(e));
    }
    return tl;
}

}  // namespace vbl
