#pragma once

#include <string>
#include <vector>

#include "qjumps/app/config.hpp"

namespace qjumps::app {

struct Preset {
    std::string name;
    std::string description;
    RunConfig config;
};

// fig2 (waiting time and telegraph validation), fig3 and fig4 (spectra of the
// two transitions), fig5-scan (mean phonon number against δ2).
const std::vector<Preset>& bundled_presets();
// ConfigError for an unknown name.
const Preset& find_preset(const std::string& name);

}  // namespace qjumps::app
