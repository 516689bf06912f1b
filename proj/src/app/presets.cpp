#include "qjumps/app/presets.hpp"

#include "qjumps/errors.hpp"

namespace qjumps::app {

namespace {

RunConfig base(const std::string& command, const std::string& prefix) {
    RunConfig c;
    c.command = command;
    c.params = SystemParams::reference();
    c.prefix = prefix;
    return c;
}

std::vector<Preset> make_presets() {
    std::vector<Preset> out;

    RunConfig fig2 = base("waiting-time", "fig2");
    fig2.waiting_time = {1e-2, 2000.0, 400};
    out.push_back({"fig2", "waiting-time distribution at the reference parameters", fig2});

    RunConfig fig3 = base("spectrum", "fig3");
    fig3.spectrum.transition = 1;
    fig3.spectrum.delta_min = -1.5;
    fig3.spectrum.delta_max = 1.5;
    fig3.spectrum.count = 3001;
    out.push_back({"fig3", "fluorescence spectrum of the g-e1 transition", fig3});

    RunConfig fig4 = base("spectrum", "fig4");
    fig4.spectrum.transition = 2;
    fig4.spectrum.delta_min = -1.5;
    fig4.spectrum.delta_max = 1.5;
    fig4.spectrum.count = 3001;
    out.push_back({"fig4", "fluorescence spectrum of the g-e2 transition", fig4});

    RunConfig fig5 = base("cooling-scan", "fig5-scan");
    fig5.scan = {"delta2", 0.6, 1.2, 61};
    out.push_back({"fig5-scan", "mean phonon number against the e2 detuning", fig5});
    return out;
}

}  // namespace

const std::vector<Preset>& bundled_presets() {
    static const std::vector<Preset> presets = make_presets();
    return presets;
}

const Preset& find_preset(const std::string& name) {
    for (const auto& p : bundled_presets())
        if (p.name == name) return p;
    std::string known;
    for (const auto& p : bundled_presets()) known += " " + p.name;
    throw ConfigError("unknown preset '" + name + "'; available:" + known);
}

}  // namespace qjumps::app
