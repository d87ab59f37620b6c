#include "nlstring/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nlstring/io.hpp"

namespace nlstring::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto r = std::from_chars(first, last, out);
    if (r.ec != std::errc{} || r.ptr != last)
        throw ConfigError(key + ": not a number: '" + value + "'");
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    int out = 0;
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto r = std::from_chars(first, last, out);
    if (r.ec != std::errc{} || r.ptr != last)
        throw ConfigError(key + ": not an integer: '" + value + "'");
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"L", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.string_params.length = parse_double(k, v);
         }},
        {"v", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.string_params.speed = parse_double(k, v);
         }},
        {"gamma", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.string_params.gamma = parse_double(k, v);
         }},
        {"sigma", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.string_params.sigma = parse_double(k, v);
         }},
        {"quantum.cutoff", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.quantum.cutoff = parse_int(k, v);
         }},
        {"quantum.max_phonons", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.quantum.max_phonons = parse_int(k, v);
         }},
        {"quantum.momentum_sector", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.quantum.momentum_sector = parse_int(k, v);
         }},
        {"classical.grid", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.classical.grid = parse_int(k, v);
         }},
        {"classical.dt", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.classical.dt = parse_double(k, v);
         }},
        {"classical.t_end", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.classical.t_end = parse_double(k, v);
         }},
        {"classical.rr_order", [](RunConfig& c, const std::string& k, const std::string& v) {
             c.classical.rr_order = parse_int(k, v);
         }},
        {"classical.reduction", [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "order-reduced")
                 c.classical.reduction = ClassicalConfig::Reduction::order_reduced;
             else if (v == "off")
                 c.classical.reduction = ClassicalConfig::Reduction::off;
             else
                 throw ConfigError(k + ": expected 'order-reduced' or 'off', got '" + v + "'");
         }},
        {"output.format", [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v == "csv")
                 c.output.format = OutputConfig::Format::csv;
             else if (v == "json")
                 c.output.format = OutputConfig::Format::json;
             else
                 throw ConfigError(k + ": expected 'csv' or 'json', got '" + v + "'");
         }},
        {"output.path", [](RunConfig& c, const std::string&, const std::string& v) {
             c.output.path = v;
         }},
    };
    return table;
}

void validate(const RunConfig& c) {
    if (!(c.string_params.length > 0.0)) throw ConfigError("L: must be > 0");
    if (!(c.string_params.speed > 0.0)) throw ConfigError("v: must be > 0");
    if (!(c.string_params.sigma >= 0.0)) throw ConfigError("sigma: must be >= 0");
    if (c.quantum.cutoff < 1) throw ConfigError("quantum.cutoff: must be >= 1");
    if (c.quantum.max_phonons < 0) throw ConfigError("quantum.max_phonons: must be >= 0");
    if (c.classical.grid < 8 || (c.classical.grid & (c.classical.grid - 1)) != 0)
        throw ConfigError("classical.grid: must be a power of two >= 8");
    if (c.classical.dt < 0.0) throw ConfigError("classical.dt: must be >= 0 (0 = default)");
    if (c.classical.t_end < 0.0) throw ConfigError("classical.t_end: must be >= 0 (0 = default)");
    if (c.classical.rr_order < 0 || c.classical.rr_order > 6)
        throw ConfigError("classical.rr_order: must be in 0..6");
    if (c.output.path.empty()) throw ConfigError("output.path: must not be empty");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig config;
    std::map<std::string, int> seen;  // key -> first line
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected key=value, got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));

        auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" +
                              key + "'");
        auto [prev, inserted] = seen.emplace(key, lineno);
        if (!inserted)
            throw ConfigError(origin + ": duplicate key '" + key + "' on lines " +
                              std::to_string(prev->second) + " and " + std::to_string(lineno));
        it->second(config, key, value);
    }
    validate(config);
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config file not found: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), path);
}

void apply_overrides(RunConfig& config, const std::vector<std::string>& overrides) {
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + ov + "': expected key=value");
        const std::string key = trim(ov.substr(0, eq));
        const std::string value = trim(ov.substr(eq + 1));
        auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError("override: unknown key '" + key + "'");
        it->second(config, key, value);
    }
    validate(config);
}

std::vector<std::pair<std::string, std::string>> RunConfig::to_key_values() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("L", io::fmt(string_params.length));
    kv.emplace_back("v", io::fmt(string_params.speed));
    kv.emplace_back("gamma", io::fmt(string_params.gamma));
    kv.emplace_back("sigma", io::fmt(string_params.sigma));
    kv.emplace_back("quantum.cutoff", io::fmt(quantum.cutoff));
    kv.emplace_back("quantum.max_phonons", io::fmt(quantum.max_phonons));
    if (quantum.momentum_sector)
        kv.emplace_back("quantum.momentum_sector", io::fmt(*quantum.momentum_sector));
    kv.emplace_back("classical.grid", io::fmt(classical.grid));
    kv.emplace_back("classical.dt", io::fmt(classical.dt));
    kv.emplace_back("classical.t_end", io::fmt(classical.t_end));
    kv.emplace_back("classical.rr_order", io::fmt(classical.rr_order));
    kv.emplace_back("classical.reduction",
                    classical.reduction == ClassicalConfig::Reduction::order_reduced
                        ? "order-reduced"
                        : "off");
    kv.emplace_back("output.format",
                    output.format == OutputConfig::Format::csv ? "csv" : "json");
    kv.emplace_back("output.path", output.path);
    return kv;
}

}  // namespace nlstring::cli
