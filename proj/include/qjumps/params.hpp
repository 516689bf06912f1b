#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qjumps {

// Physical parameters. Rates, frequencies and detunings are in units of the
// trap frequency; angles in radians.
struct SystemParams {
    double gamma1 = 12.0;
    double gamma2 = 0.015;
    double omega1 = 2.5;
    double omega2 = 0.5;
    double delta1 = 6.0;
    double delta2 = 0.87;
    double eta1 = 0.05;
    double eta2 = 0.05;
    double phi1 = 0.0;
    double phi2 = 0.0;
    double psi = 0.0;
    int n_fock = 15;

    // The parameter set of the quantum-jump figures (bright/dark telegraph regime).
    static SystemParams reference();

    // Throws InvalidParams when an invariant is broken.
    void validate() const;

    // Access by field name, used by scans and the config loader.
    double get(std::string_view name) const;
    void set(std::string_view name, double value);
    static const std::vector<std::string>& real_field_names();

    bool operator==(const SystemParams&) const = default;
};

}  // namespace qjumps
