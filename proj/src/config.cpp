#include "vortexbl/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace vbl {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open: " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& name) {
    Config cfg;
    cfg.source_ = name;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3)
                throw ConfigError(name + ":" + std::to_string(lineno) +
                                  ": malformed section header '" + s + "'");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty())
                throw ConfigError(name + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + s + "'");
        Entry e;
        e.section = section;
        e.key = trim(s.substr(0, eq));
        e.value = trim(s.substr(eq + 1));
        e.line = lineno;
        if (e.key.empty())
            throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
        if (e.value.empty())
            throw ConfigError(name + ":" + std::to_string(lineno) + ": missing value for '" +
                              e.key + "'");
        if (section.empty())
            throw ConfigError(name + ":" + std::to_string(lineno) + ": key '" + e.key +
                              "' appears before any [section] header");
        if (cfg.find(e.section, e.key) != nullptr)
            throw ConfigError(name + ":" + std::to_string(lineno) + ": duplicate key '" + e.key +
                              "' in section [" + e.section + "]");
        cfg.entries_.push_back(std::move(e));
    }
    return cfg;
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
    for (const auto& e : entries_)
        if (e.section == section && e.key == key) return &e;
    return nullptr;
}

void Config::fail(const Entry& e, const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(e.line) + ": " + what + " (key '" + e.key +
                      "' in section [" + e.section + "], value '" + e.value + "')");
}

bool Config::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

const std::string& Config::get(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (e == nullptr)
        throw ConfigError(source_ + ": missing key '" + key + "' in section [" + section + "]");
    return e->value;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (e == nullptr)
        throw ConfigError(source_ + ": missing key '" + key + "' in section [" + section + "]");
    char* end = nullptr;
    const double v = std::strtod(e->value.c_str(), &end);
    if (end == e->value.c_str() || *end != '\0') fail(*e, "not a number");
    return v;
}

int Config::get_int(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (e == nullptr)
        throw ConfigError(source_ + ": missing key '" + key + "' in section [" + section + "]");
    char* end = nullptr;
    const long v = std::strtol(e->value.c_str(), &end, 10);
    if (end == e->value.c_str() || *end != '\0') fail(*e, "not an integer");
    return static_cast<int>(v);
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (e == nullptr)
        throw ConfigError(source_ + ": missing key '" + key + "' in section [" + section + "]");
    if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
    if (e->value == "false" || e->value == "0" || e->value == "no") return false;
    fail(*e, "not a boolean (use true/false)");
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    for (auto& e : entries_)
        if (e.section == section && e.key == key) {
            e.value = value;
            e.line = 0;
            return;
        }
    Entry e;
    e.section = section;
    e.key = key;
    e.value = value;
    entries_.push_back(std::move(e));
}

}  // namespace vbl
