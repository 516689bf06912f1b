#pragma once

#include <stdexcept>
#include <string>

namespace qjumps {

// Root of every error the library raises. kind() is a stable tag used by the CLI.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("ConfigError", what) {}
};

// Numerical or physical failure during a computation.
class ComputeError : public Error {
public:
    using Error::Error;
};

#define QJUMPS_COMPUTE_ERROR(Name)                                            \
    class Name : public ComputeError {                                        \
    public:                                                                   \
        explicit Name(const std::string& what) : ComputeError(#Name, what) {} \
    };

QJUMPS_COMPUTE_ERROR(InvalidParams)
QJUMPS_COMPUTE_ERROR(NonUniqueSteadyState)
QJUMPS_COMPUTE_ERROR(NearDefective)
QJUMPS_COMPUTE_ERROR(DegenerateInternal)
QJUMPS_COMPUTE_ERROR(ResolventPole)
QJUMPS_COMPUTE_ERROR(HeatingRegime)
QJUMPS_COMPUTE_ERROR(NoTimescaleSeparation)
QJUMPS_COMPUTE_ERROR(InfiniteBright)

#undef QJUMPS_COMPUTE_ERROR

}  // namespace qjumps
