#ifndef WAVEDUCT_CONFIG_HPP
#define WAVEDUCT_CONFIG_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "waveduct/geometry.hpp"
#include "waveduct/signals.hpp"

namespace waveduct {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/* Sectioned key=value text:
 *
 *   [geometry]
 *   kind = cone
 *   r0 = 0.01
 *
 * '#' starts a comment; keys are unique within their section. Errors name
 * the offending section.key path. */
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::uint64_t get_uint64(const std::string& section, const std::string& key,
                             std::uint64_t fallback) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

    // Serialized form re-parses to an equal Config.
    std::string serialize() const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

enum class SignalKind { Gaussian, SineBurst, File, Zero };

struct SignalSpec {
    SignalKind kind = SignalKind::Gaussian;
    double amplitude = 1.0;
    double center = 0.002;
    double width = 5e-4;
    double frequency = 1000.0;
    std::string file;
};

Signal make_signal(const SignalSpec& spec);

/* Fully resolved run parameters with defaults applied. resolve_config
 * rejects unknown sections and keys by name. */
struct RunConfig {
    ProfileSpec geometry;
    int n_samples = 0; // 0 = derive from the discretization
    PhysicalConstants physics;

    int n_elems = 200;
    int ns = 300;
    int nr = 24;
    double dt = 1e-4;
    double t_final = 0.02;
    int record_stride = 10;

    SignalSpec input;

    std::string out_dir = "out";
    std::string prefix = "run";

    int n_defect_samples = 100;
    std::uint64_t seed = 42;
    double tol_identity = 1e-10;
    double tol_passivity = 1e-10;
};

RunConfig resolve_config(const Config& cfg);

// Round-trippable echo of the resolved configuration (run.meta payload).
Config run_config_to_config(const RunConfig& rc);

} // namespace waveduct

#endif
