// Flat key=value run configuration with section prefixes, e.g.
//
//   L=6.2831853
//   gamma=0.01
//   quantum.cutoff=3
//   classical.dt=0.005
//   output.format=csv
//
// Unknown and duplicate keys are errors; missing keys take the documented
// defaults. Setting classical.dt or classical.t_end to 0 selects the derived
// defaults 1e-3 L/v and L/v.

#ifndef NLSTRING_CONFIG_HPP
#define NLSTRING_CONFIG_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nlstring/modes.hpp"

namespace nlstring::cli {

/// Configuration and CLI-usage problems; mapped to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuantumConfig {
    int cutoff = 3;
    int max_phonons = 4;
    std::optional<int> momentum_sector;
    bool operator==(const QuantumConfig&) const = default;
};

struct ClassicalConfig {
    int grid = 256;
    double dt = 0.0;     // 0 = 1e-3 L/v
    double t_end = 0.0;  // 0 = L/v
    int rr_order = 0;
    enum class Reduction { order_reduced, off };
    Reduction reduction = Reduction::order_reduced;
    bool operator==(const ClassicalConfig&) const = default;
};

struct OutputConfig {
    enum class Format { csv, json };
    Format format = Format::csv;
    std::string path = "out";
    bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
    StringParams string_params{6.283185307179586, 1.0, 0.0, 0.0};
    QuantumConfig quantum;
    ClassicalConfig classical;
    OutputConfig output;

    double effective_dt() const {
        return classical.dt > 0.0 ? classical.dt
                                  : 1e-3 * string_params.length / string_params.speed;
    }
    double effective_t_end() const {
        return classical.t_end > 0.0 ? classical.t_end
                                     : string_params.length / string_params.speed;
    }

    /// Every key of the flat format with its current value, momentum_sector
    /// omitted while unset. Reparsing the list reproduces this config.
    std::vector<std::pair<std::string, std::string>> to_key_values() const;

    bool operator==(const RunConfig&) const = default;
};

/// Parse a config file. Errors name the offending key and line.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");

/// Apply "key=value" overrides on top of an existing config.
void apply_overrides(RunConfig& config, const std::vector<std::string>& overrides);

}  // namespace nlstring::cli

#endif  // NLSTRING_CONFIG_HPP
