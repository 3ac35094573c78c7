#include "shapepde/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace shapepde {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, int line) {
    try {
        size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse number '" + text + "'", line);
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(trim(item));
    return parts;
}

}  // namespace

IniFile IniFile::parse_text(const std::string& text) {
    IniFile ini;
    std::stringstream ss(text);
    std::string line;
    std::string section;  // keys before the first header live in ""
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", lineno);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("empty section name", lineno);
            ini.sections_[section];
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", lineno);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", lineno);
        ini.sections_[section][key] = {value, lineno};
    }
    return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'", 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

const IniFile::Entry& IniFile::entry(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end() || !s->second.count(key))
        throw ConfigError("missing key '" + key + "' in section [" + section + "]", 0);
    return s->second.at(key);
}

std::string IniFile::get_string(const std::string& section, const std::string& key) const {
    return entry(section, key).value;
}

std::string IniFile::get_string(const std::string& section, const std::string& key,
                                const std::string& fallback) const {
    return has(section, key) ? entry(section, key).value : fallback;
}

double IniFile::get_double(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    return parse_double(e.value, e.line);
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

int IniFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) return fallback;
    const Entry& e = entry(section, key);
    double v = parse_double(e.value, e.line);
    int i = static_cast<int>(std::lround(v));
    if (std::abs(v - i) > 1e-9) throw ConfigError("expected integer for '" + key + "'", e.line);
    return i;
}

Vec IniFile::get_point(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    auto parts = split(e.value, ',');
    Vec v(static_cast<Eigen::Index>(parts.size()));
    for (size_t i = 0; i < parts.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_double(parts[i], e.line);
    return v;
}

std::vector<double> IniFile::get_list(const std::string& section, const std::string& key) const {
    const Entry& e = entry(section, key);
    auto parts = split(e.value, ',');
    std::vector<double> out;
    out.reserve(parts.size());
    for (const auto& p : parts) out.push_back(parse_double(p, e.line));
    return out;
}

Shape parse_shape(const IniFile& ini, const std::string& section) {
    if (!ini.has_section(section)) throw ConfigError("missing [" + section + "] block", 0);
    const std::string kind = ini.get_string(section, "kind");
    const int kind_line = ini.entry(section, "kind").line;
    try {
        if (kind == "ball") {
            return make_ball(ini.get_point(section, "center"), ini.get_double(section, "radius"));
        } else if (kind == "box") {
            return make_box(ini.get_point(section, "lo"), ini.get_point(section, "hi"));
        } else if (kind == "polygon") {
            const auto& e = ini.entry(section, "vertices");
            std::vector<Vec> verts;
            for (const auto& pair : split(e.value, ';')) {
                auto xy = split(pair, ',');
                if (xy.size() != 2) throw ConfigError("polygon vertex needs x,y", e.line);
                verts.push_back(vec2(parse_double(xy[0], e.line), parse_double(xy[1], e.line)));
            }
            return make_polygon(std::move(verts));
        } else if (kind == "halfspace") {
            return make_halfspace(ini.get_point(section, "normal"), ini.get_double(section, "offset"));
        } else if (kind == "cusp") {
            return make_cusp(ini.get_double(section, "alpha"), ini.get_double(section, "extent"));
        } else if (kind == "union") {
            int count = ini.get_int(section, "members", 0);
            if (count < 1) throw ConfigError("union needs members >= 1", kind_line);
            std::vector<Shape> members;
            for (int i = 1; i <= count; ++i)
                members.push_back(parse_shape(ini, section + "_" + std::to_string(i)));
            return make_union(std::move(members));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("invalid shape: ") + ex.what(), kind_line);
    }
    throw ConfigError("unknown shape kind '" + kind + "'", kind_line);
}

namespace {

StudyConfig finish_config(IniFile ini) {
    StudyConfig cfg;
    cfg.raw = ini;
    // `study` may sit at the top or under [params]
    if (ini.has("", "study"))
        cfg.study = ini.get_string("", "study");
    else if (ini.has("params", "study"))
        cfg.study = ini.get_string("params", "study");
    else
        throw ConfigError("missing 'study' key", 0);

    static const std::vector<std::string> kKnown = {
        "normals-elliptic", "normals-heat", "corner-study", "distance",
        "signed-distance",  "rate-study",   "mean-check"};
    if (std::find(kKnown.begin(), kKnown.end(), cfg.study) == kKnown.end())
        throw ConfigError("unknown study '" + cfg.study + "'",
                          ini.has("", "study") ? ini.entry("", "study").line
                                               : ini.entry("params", "study").line);

    cfg.threads = ini.get_int("", "threads", ini.get_int("params", "threads", 1));
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1", 0);
    cfg.seed = static_cast<unsigned>(ini.get_int("", "seed", ini.get_int("params", "seed", 42)));
    cfg.out_dir = ini.get_string("output", "dir", "out");

    if (ini.has_section("shape")) cfg.shape = parse_shape(ini, "shape");

    if (ini.has_section("grid")) {
        Vec lo = ini.get_point("grid", "lo");
        Vec hi = ini.get_point("grid", "hi");
        Vec nn = ini.get_point("grid", "n");
        Eigen::VectorXi n(nn.size());
        for (Eigen::Index i = 0; i < nn.size(); ++i) n(i) = static_cast<int>(std::lround(nn(i)));
        try {
            cfg.grid = Grid(lo, hi, n);
        } catch (const std::exception& ex) {
            throw ConfigError(std::string("invalid grid: ") + ex.what(),
                              ini.entry("grid", "n").line);
        }
        cfg.supersample = ini.get_int("grid", "supersample", 4);
        if (cfg.supersample < 1)
            throw ConfigError("supersample must be >= 1", ini.entry("grid", "supersample").line);
    }

    // a/t sweeps must be strictly decreasing wherever present
    for (const char* key : {"a_list", "t_list", "eps_list"}) {
        if (!ini.has("params", key)) continue;
        auto vals = ini.get_list("params", key);
        if (std::string(key) == "eps_list") continue;  // radii increase instead
        for (size_t i = 1; i < vals.size(); ++i)
            if (!(vals[i] < vals[i - 1]))
                throw ConfigError(std::string(key) + " must be strictly decreasing",
                                  ini.entry("params", key).line);
    }
    return cfg;
}

}  // namespace

StudyConfig load_config(const std::string& path) { return finish_config(IniFile::parse_file(path)); }

StudyConfig load_config_text(const std::string& text) {
    return finish_config(IniFile::parse_text(text));
}

}  // namespace shapepde
