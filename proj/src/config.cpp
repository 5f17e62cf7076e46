#include "waveduct/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace waveduct {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void fail_at(const std::string& origin, int line, const std::string& msg) {
    std::ostringstream os;
    os << origin << ":" << line << ": " << msg;
    throw ConfigError(os.str());
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail_at(origin, line_no, "malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) fail_at(origin, line_no, "empty section name");
            cfg.sections_[section];
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail_at(origin, line_no, "expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail_at(origin, line_no, "empty key");
        if (section.empty()) fail_at(origin, line_no, "key '" + key + "' outside any section");
        auto& sec = cfg.sections_[section];
        if (sec.count(key))
            fail_at(origin, line_no, "duplicate key " + section + "." + key);
        sec[key] = value;
    }
    return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    auto it = sections_.find(section);
    if (it == sections_.end()) return fallback;
    auto jt = it->second.find(key);
    return jt == it->second.end() ? fallback : jt->second;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = sections_.at(section).at(key);
    const char* begin = raw.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ConfigError(section + "." + key + ": not a number: '" + raw + "'");
    return v;
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = sections_.at(section).at(key);
    const char* begin = raw.c_str();
    char* end = nullptr;
    long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw ConfigError(section + "." + key + ": not an integer: '" + raw + "'");
    return static_cast<int>(v);
}

std::uint64_t Config::get_uint64(const std::string& section, const std::string& key,
                                 std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string raw = sections_.at(section).at(key);
    const char* begin = raw.c_str();
    char* end = nullptr;
    unsigned long long v = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw ConfigError(section + "." + key + ": not an integer: '" + raw + "'");
    return static_cast<std::uint64_t>(v);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = value;
}

std::string Config::serialize() const {
    std::string out;
    for (const auto& [name, entries] : sections_) {
        out += "[" + name + "]\n";
        for (const auto& [key, value] : entries) out += key + " = " + value + "\n";
        out += "\n";
    }
    return out;
}

Signal make_signal(const SignalSpec& spec) {
    switch (spec.kind) {
        case SignalKind::Gaussian:
            return gaussian_pulse(spec.amplitude, spec.center, spec.width);
        case SignalKind::SineBurst:
            return sine_burst(spec.amplitude, spec.frequency, spec.center - 0.5 * spec.width,
                              spec.width);
        case SignalKind::File:
            return tabulated_signal_from_file(spec.file);
        case SignalKind::Zero:
            break;
    }
    return zero_signal();
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"geometry", {"kind", "r0", "r1", "kappa", "table", "n_samples"}},
        {"physics", {"c", "rho", "alpha"}},
        {"discretization", {"n_elems", "ns", "nr", "dt", "t_final", "record_stride"}},
        {"input", {"kind", "amplitude", "center", "width", "frequency", "file"}},
        {"output", {"directory", "prefix"}},
        {"verify", {"n_defect_samples", "seed", "tol_identity", "tol_passivity"}},
    };
    return keys;
}

ProfileKind parse_profile_kind(const std::string& name) {
    if (name == "constant") return ProfileKind::Constant;
    if (name == "cone") return ProfileKind::Cone;
    if (name == "exponential") return ProfileKind::ExponentialHorn;
    if (name == "cosine-bump") return ProfileKind::CosineBump;
    if (name == "tabulated") return ProfileKind::Tabulated;
    throw ConfigError("geometry.kind: unknown profile kind '" + name + "'");
}

std::string profile_kind_name(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::Constant: return "constant";
        case ProfileKind::Cone: return "cone";
        case ProfileKind::ExponentialHorn: return "exponential";
        case ProfileKind::CosineBump: return "cosine-bump";
        case ProfileKind::Tabulated: return "tabulated";
    }
    return "constant";
}

SignalKind parse_signal_kind(const std::string& name) {
    if (name == "gaussian") return SignalKind::Gaussian;
    if (name == "sine-burst") return SignalKind::SineBurst;
    if (name == "file") return SignalKind::File;
    if (name == "zero") return SignalKind::Zero;
    throw ConfigError("input.kind: unknown signal kind '" + name + "'");
}

std::string signal_kind_name(SignalKind kind) {
    switch (kind) {
        case SignalKind::Gaussian: return "gaussian";
        case SignalKind::SineBurst: return "sine-burst";
        case SignalKind::File: return "file";
        case SignalKind::Zero: return "zero";
    }
    return "gaussian";
}

void require(bool cond, const std::string& path, const std::string& why) {
    if (!cond) throw ConfigError(path + ": " + why);
}

} // namespace

RunConfig resolve_config(const Config& cfg) {
    for (const auto& [name, entries] : cfg.sections()) {
        auto it = known_keys().find(name);
        if (it == known_keys().end()) throw ConfigError("unknown section: " + name);
        for (const auto& [key, value] : entries) {
            (void)value;
            if (!it->second.count(key)) throw ConfigError("unknown key: " + name + "." + key);
        }
    }

    RunConfig rc;
    if (!cfg.has("geometry", "kind")) throw ConfigError("missing geometry.kind");
    rc.geometry.kind = parse_profile_kind(cfg.get_string("geometry", "kind", ""));
    rc.geometry.r0 = cfg.get_double("geometry", "r0", rc.geometry.r0);
    rc.geometry.r1 = cfg.get_double("geometry", "r1", rc.geometry.r0);
    rc.geometry.kappa = cfg.get_double("geometry", "kappa", rc.geometry.kappa);
    rc.geometry.table_path = cfg.get_string("geometry", "table", rc.geometry.table_path);
    rc.n_samples = cfg.get_int("geometry", "n_samples", rc.n_samples);
    require(rc.geometry.r0 > 0.0, "geometry.r0", "must be positive");
    require(rc.geometry.r1 > 0.0, "geometry.r1", "must be positive");
    require(rc.n_samples == 0 || rc.n_samples >= 3, "geometry.n_samples", "must be 0 or >= 3");
    if (rc.geometry.kind == ProfileKind::Tabulated)
        require(!rc.geometry.table_path.empty(), "geometry.table",
                "required for the tabulated kind");

    rc.physics.c = cfg.get_double("physics", "c", rc.physics.c);
    rc.physics.rho = cfg.get_double("physics", "rho", rc.physics.rho);
    rc.physics.alpha = cfg.get_double("physics", "alpha", rc.physics.alpha);
    require(rc.physics.c > 0.0, "physics.c", "must be positive");
    require(rc.physics.rho > 0.0, "physics.rho", "must be positive");
    require(rc.physics.alpha >= 0.0, "physics.alpha", "must be nonnegative");

    rc.n_elems = cfg.get_int("discretization", "n_elems", rc.n_elems);
    rc.ns = cfg.get_int("discretization", "ns", rc.ns);
    rc.nr = cfg.get_int("discretization", "nr", rc.nr);
    rc.dt = cfg.get_double("discretization", "dt", rc.dt);
    rc.t_final = cfg.get_double("discretization", "t_final", rc.t_final);
    rc.record_stride = cfg.get_int("discretization", "record_stride", rc.record_stride);
    require(rc.n_elems >= 2, "discretization.n_elems", "must be >= 2");
    require(rc.ns >= 4, "discretization.ns", "must be >= 4");
    require(rc.nr >= 2, "discretization.nr", "must be >= 2");
    require(rc.dt > 0.0, "discretization.dt", "must be positive");
    require(rc.t_final > 0.0, "discretization.t_final", "must be positive");
    require(rc.record_stride >= 1, "discretization.record_stride", "must be >= 1");

    rc.input.kind = parse_signal_kind(cfg.get_string("input", "kind", "gaussian"));
    rc.input.amplitude = cfg.get_double("input", "amplitude", rc.input.amplitude);
    rc.input.center = cfg.get_double("input", "center", rc.input.center);
    rc.input.width = cfg.get_double("input", "width", rc.input.width);
    rc.input.frequency = cfg.get_double("input", "frequency", rc.input.frequency);
    rc.input.file = cfg.get_string("input", "file", rc.input.file);
    require(rc.input.width > 0.0, "input.width", "must be positive");
    require(rc.input.frequency > 0.0, "input.frequency", "must be positive");
    if (rc.input.kind == SignalKind::File)
        require(!rc.input.file.empty(), "input.file", "required for the file kind");

    rc.out_dir = cfg.get_string("output", "directory", rc.out_dir);
    rc.prefix = cfg.get_string("output", "prefix", rc.prefix);
    require(!rc.out_dir.empty(), "output.directory", "must not be empty");
    require(!rc.prefix.empty(), "output.prefix", "must not be empty");

    rc.n_defect_samples = cfg.get_int("verify", "n_defect_samples", rc.n_defect_samples);
    rc.seed = cfg.get_uint64("verify", "seed", rc.seed);
    rc.tol_identity = cfg.get_double("verify", "tol_identity", rc.tol_identity);
    rc.tol_passivity = cfg.get_double("verify", "tol_passivity", rc.tol_passivity);
    require(rc.n_defect_samples >= 1, "verify.n_defect_samples", "must be >= 1");
    require(rc.tol_identity > 0.0, "verify.tol_identity", "must be positive");
    require(rc.tol_passivity > 0.0, "verify.tol_passivity", "must be positive");
    return rc;
}

Config run_config_to_config(const RunConfig& rc) {
    Config cfg;
    cfg.set("geometry", "kind", profile_kind_name(rc.geometry.kind));
    cfg.set("geometry", "r0", format_double(rc.geometry.r0));
    cfg.set("geometry", "r1", format_double(rc.geometry.r1));
    cfg.set("geometry", "kappa", format_double(rc.geometry.kappa));
    if (!rc.geometry.table_path.empty()) cfg.set("geometry", "table", rc.geometry.table_path);
    if (rc.n_samples > 0) cfg.set("geometry", "n_samples", std::to_string(rc.n_samples));

    cfg.set("physics", "c", format_double(rc.physics.c));
    cfg.set("physics", "rho", format_double(rc.physics.rho));
    cfg.set("physics", "alpha", format_double(rc.physics.alpha));

    cfg.set("discretization", "n_elems", std::to_string(rc.n_elems));
    cfg.set("discretization", "ns", std::to_string(rc.ns));
    cfg.set("discretization", "nr", std::to_string(rc.nr));
    cfg.set("discretization", "dt", format_double(rc.dt));
    cfg.set("discretization", "t_final", format_double(rc.t_final));
    cfg.set("discretization", "record_stride", std::to_string(rc.record_stride));

    cfg.set("input", "kind", signal_kind_name(rc.input.kind));
    cfg.set("input", "amplitude", format_double(rc.input.amplitude));
    cfg.set("input", "center", format_double(rc.input.center));
    cfg.set("input", "width", format_double(rc.input.width));
    cfg.set("input", "frequency", format_double(rc.input.frequency));
    if (!rc.input.file.empty()) cfg.set("input", "file", rc.input.file);

    cfg.set("output", "directory", rc.out_dir);
    cfg.set("output", "prefix", rc.prefix);

    cfg.set("verify", "n_defect_samples", std::to_string(rc.n_defect_samples));
    cfg.set("verify", "seed", std::to_string(rc.seed));
    cfg.set("verify", "tol_identity", format_double(rc.tol_identity));
    cfg.set("verify", "tol_passivity", format_double(rc.tol_passivity));
    return cfg;
}

} // namespace waveduct
