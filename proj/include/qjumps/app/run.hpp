#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qjumps/app/config.hpp"

namespace qjumps::app {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kSuccess = 0, kConfigFailure = 2, kComputeFailure = 3, kToleranceFailure = 4 };

struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct RunSummary {
    std::string command;
    double wall_seconds = 0.0;
    std::map<std::string, double> scalars;
    std::vector<std::string> outputs;
    std::string version = kVersion;
    std::string config_hash;
    std::vector<Check> checks;

    bool checks_passed() const;
    std::string to_json() const;  // pretty-printed
};

// Dispatches config.command and writes its artifacts under output_dir.
// ConfigError for a missing command; module errors propagate.
RunSummary run(const RunConfig& config);

// Command-line front end; returns the process exit status.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qjumps::app
