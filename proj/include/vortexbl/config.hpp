#pragma once

/// Flat key-value run configuration with [section] headers:
///
///   # comment
///   [prandtl]
///   nx = 1024
///   epsilon = 0.05
///
/// Parsing and typed access report errors with file and line so a bad config
/// is diagnosable from the message alone.  Unknown-key rejection lives with
/// the scenario schema, which walks entries().

#include <stdexcept>
#include <string>
#include <vector>

namespace vbl {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Config {
public:
    struct Entry {
        std::string section, key, value;
        int line = 0;
    };

    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& name);

    bool has(const std::string& section, const std::string& key) const;
    const std::string& get(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key) const;
    int get_int(const std::string& section, const std::string& key) const;
    bool get_bool(const std::string& section, const std::string& key) const;

    /// Add or replace (used for command-line overrides; line stays 0).
    void set(const std::string& section, const std::string& key, const std::string& value);

    const std::vector<Entry>& entries() const { return entries_; }
    const std::string& source() const { return source_; }

private:
    const Entry* find(const std::string& section, const std::string& key) const;
    [[noreturn]] void fail(const Entry& e, const std::string& what) const;

    std::vector<Entry> entries_;
    std::string source_ = "<empty>";
};

}  // namespace vbl
