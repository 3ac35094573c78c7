#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shapepde/geometry.hpp"
#include "shapepde/grid.hpp"

namespace shapepde {

// Config parse failure; carries the offending line number (0 = file level).
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& msg, int line_)
        : std::runtime_error(msg + (line_ > 0 ? " (line " + std::to_string(line_) + ")" : "")),
          line(line_) {}
    int line = 0;
};

// INI-style file: [section] headers, key = value lines, '#' comments.
class IniFile {
public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static IniFile parse_file(const std::string& path);
    static IniFile parse_text(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    const Entry& entry(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    Vec get_point(const std::string& section, const std::string& key) const;
    std::vector<double> get_list(const std::string& section, const std::string& key) const;

    bool has_section(const std::string& section) const { return sections_.count(section) > 0; }

private:
    std::map<std::string, std::map<std::string, Entry>> sections_;
};

struct StudyConfig {
    std::string study;
    int threads = 1;
    unsigned seed = 42;
    std::string out_dir = "out";

    std::optional<Shape> shape;
    std::optional<Grid> grid;
    int supersample = 4;

    IniFile raw;  // study-specific [params] keys are read on demand
};

// Parses and validates the blocks every study needs; throws ConfigError.
StudyConfig load_config(const std::string& path);
StudyConfig load_config_text(const std::string& text);

Shape parse_shape(const IniFile& ini, const std::string& section);

}  // namespace shapepde
