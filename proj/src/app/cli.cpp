#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qjumps/app/config.hpp"
#include "qjumps/app/presets.hpp"
#include "qjumps/app/run.hpp"
#include "qjumps/errors.hpp"

namespace qjumps::app {

namespace {

void print_summary(const RunSummary& s, std::ostream& out) {
    out << "command: " << s.command << "  (config " << s.config_hash << ", " << std::fixed << std::setprecision(2)
        << s.wall_seconds << " s)\n";
    out << std::defaultfloat << std::setprecision(6);
    for (const auto& [k, v] : s.scalars) out << "  " << k << " = " << v << "\n";
    for (const auto& c : s.checks)
        out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": " << c.value << " (tolerance " << c.tolerance
            << ")\n";
    for (const auto& o : s.outputs) out << "  wrote " << o << "\n";
}

std::string exact_text(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Motion-induced quantum jumps of a trapped three-level atom"};
    app.fallthrough();
    std::string config_path, preset, output_dir, prefix;
    std::vector<std::string> overrides;
    bool list_presets = false, print_config = false;
    app.add_option("-c,--config", config_path, "configuration file");
    app.add_option("-p,--preset", preset, "bundled preset (fig2, fig3, fig4, fig5-scan)");
    app.add_option("-o,--output", output_dir, "output directory");
    app.add_option("--prefix", prefix, "output file prefix");
    app.add_option("-s,--set", overrides, "override, e.g. eta2=0.03 or spectrum.count=501");
    app.add_flag("--list-presets", list_presets, "list bundled presets and exit");
    app.add_flag("--print-config", print_config, "print the resolved configuration and exit");

    auto* wt = app.add_subcommand("waiting-time", "no-emission probability, split time, bright and dark periods");
    auto* sp = app.add_subcommand("spectrum", "perturbative fluorescence spectrum of one transition");
    int transition = 0;
    bool exact = false;
    double n_bar = -1.0;
    sp->add_option("-t,--transition", transition, "1 or 2");
    sp->add_flag("--exact", exact, "also compute the full-Liouvillian spectrum");
    sp->add_option("--n-bar", n_bar, "force a thermal motional state");
    auto* cs = app.add_subcommand("cooling-scan", "mean phonon number against one parameter");
    std::string scan_param;
    cs->add_option("--parameter", scan_param, "parameter to scan");
    auto* tr = app.add_subcommand("trajectory", "Monte Carlo emission record");
    long long seed = -1;
    double duration = -1.0;
    tr->add_option("--seed", seed, "RNG seed");
    tr->add_option("--duration", duration, "record length");
    auto* va = app.add_subcommand("validate", "property checks and telegraph time scales");
    (void)wt;
    (void)va;
    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kConfigFailure;
    }

    try {
        if (list_presets) {
            for (const auto& p : bundled_presets()) out << p.name << "\t" << p.config.command << "\t" << p.description << "\n";
            return kSuccess;
        }
        if (!config_path.empty() && !preset.empty()) throw ConfigError("give either --config or --preset, not both");
        RunConfig c = !preset.empty() ? find_preset(preset).config
                      : !config_path.empty() ? load_config(config_path)
                                             : parse_config("");
        if (const auto subs = app.get_subcommands(); !subs.empty()) c.command = subs.front()->get_name();
        if (!output_dir.empty()) c.output_dir = output_dir;
        if (!prefix.empty()) c.prefix = prefix;
        for (const auto& o : overrides) apply_override(c, o);
        if (transition) apply_override(c, "spectrum.transition=" + std::to_string(transition));
        if (exact) apply_override(c, "spectrum.exact=true");
        if (n_bar >= 0.0) apply_override(c, "spectrum.n_bar=" + exact_text(n_bar));
        if (!scan_param.empty()) apply_override(c, "cooling_scan.parameter=" + scan_param);
        if (seed >= 0) apply_override(c, "trajectory.seed=" + std::to_string(seed));
        if (duration > 0.0) apply_override(c, "trajectory.duration=" + exact_text(duration));

        if (print_config) {
            out << serialize_config(c);
            return kSuccess;
        }
        const RunSummary s = run(c);
        print_summary(s, out);
        return s.checks_passed() ? kSuccess : kToleranceFailure;
    } catch (const ConfigError& e) {
        err << "error [ConfigError]: " << e.what() << "\n";
        return kConfigFailure;
    } catch (const Error& e) {
        err << "error [" << e.kind() << "]: " << e.what() << "\n";
        return kComputeFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kComputeFailure;
    }
}

}  // namespace qjumps::app
