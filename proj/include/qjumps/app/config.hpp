#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "qjumps/params.hpp"

namespace qjumps::app {

inline const std::string kUnits = "trap_frequency";

struct WaitingTimeOptions {
    double t_min = 1e-2;
    double t_max = 2000.0;
    int count = 400;

    bool operator==(const WaitingTimeOptions&) const = default;
};

struct SpectrumOptions {
    int transition = 1;
    double delta_min = -2.0;
    double delta_max = 2.0;
    int count = 2001;
    std::optional<double> n_bar;  // force a thermal motional state
    bool exact = false;           // also write the full-Liouvillian spectrum

    bool operator==(const SpectrumOptions&) const = default;
};

struct ScanOptions {
    std::string parameter = "delta2";
    double start = 0.6;
    double stop = 1.2;
    int count = 61;

    bool operator==(const ScanOptions&) const = default;
};

struct TrajectoryOptions {
    double duration = 8.0e5;
    std::uint64_t seed = 1;
    std::optional<double> dark_threshold;  // split time of P(t) when absent

    bool operator==(const TrajectoryOptions&) const = default;
};

struct RunConfig {
    std::string command;  // waiting-time | spectrum | cooling-scan | trajectory | validate
    SystemParams params;
    WaitingTimeOptions waiting_time;
    SpectrumOptions spectrum;
    ScanOptions scan;
    TrajectoryOptions trajectory;
    std::string output_dir = ".";
    std::string prefix = "qjumps";
    std::map<std::string, double> tolerances;

    bool operator==(const RunConfig&) const = default;
};

// Sectioned key = value text. `units` and every [system] field are required;
// ConfigError lists everything missing or malformed at once.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

// Applies "section.key=value" or "key=value" (system section) overrides.
void apply_override(RunConfig& c, const std::string& assignment);

// Number or a multiple of pi such as "4*pi/5", "pi/9", "-pi".
double parse_real(const std::string& text);

}  // namespace qjumps::app
