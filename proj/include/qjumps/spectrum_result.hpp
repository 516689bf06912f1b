#pragma once

#include <map>
#include <string>
#include <vector>

#include "qjumps/types.hpp"

namespace qjumps {

// One pole of a spectrum: contributes Re{weight / (i Δω - lambda)}.
struct SpectralLine {
    Complex lambda;
    Complex weight;
    std::string component;
    int internal_index = -1;  // zero-order internal mode, -1 when not applicable
    int ell = 0;              // motional index of the zero-order cluster
};

inline double line_shape(const SpectralLine& line, double detuning) {
    return (line.weight / (I_UNIT * detuning - line.lambda)).real();
}

// Component curve names.
namespace component {
inline const std::string elastic_correction = "elastic_correction";
inline const std::string sideband_red = "sideband_red";
inline const std::string sideband_blue = "sideband_blue";
inline const std::string inelastic_zero = "inelastic_zero";
inline const std::string inelastic_second = "inelastic_second";
inline const std::string inelastic = "inelastic";
}  // namespace component

struct SpectrumResult {
    int transition = 1;
    std::string order;
    std::vector<double> grid;
    std::vector<double> total;
    std::map<std::string, std::vector<double>> components;
    // Weight of the λ = 0 delta peak; never added to the curves.
    double elastic_weight = 0.0;
    std::vector<SpectralLine> lines;

    // Zero curve when the component is absent.
    std::vector<double> component_or_zero(const std::string& name) const;
    // Sum of line weights for one component.
    Complex component_weight(const std::string& name) const;

    // Adds every line except elastic ones to the curves and the total.
    void render();
};

}  // namespace qjumps
