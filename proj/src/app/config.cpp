#include "qjumps/app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <regex>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qjumps/errors.hpp"

namespace qjumps::app {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    s = s.substr(b, e - b + 1);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
    return s;
}

std::string format_real(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

int parse_int(const std::string& text) {
    const double v = parse_real(text);
    if (v != std::floor(v) || std::abs(v) > 2e9) throw std::invalid_argument("not an integer");
    return static_cast<int>(v);
}

bool parse_bool(const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw std::invalid_argument("not a boolean");
}

// Collects problems so the user sees all of them at once.
struct Problems {
    std::vector<std::string> missing, invalid;

    void raise() const {
        if (missing.empty() && invalid.empty()) return;
        std::string msg = "invalid configuration";
        if (!missing.empty()) {
            msg += "; missing fields:";
            for (const auto& m : missing) msg += " " + m;
        }
        if (!invalid.empty()) {
            msg += "; invalid fields:";
            for (const auto& m : invalid) msg += " " + m;
        }
        throw ConfigError(msg);
    }
};

template <class F>
void read_optional(const pt::ptree& tree, const std::string& path, Problems& pr, F&& assign) {
    const auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '/'));
    if (!v) return;
    try {
        assign(trim(*v));
    } catch (const std::exception&) {
        pr.invalid.push_back(path + " ('" + trim(*v) + "')");
    }
}

// Keys accepted in each section; [tolerances] takes any check name.
const std::map<std::string, std::vector<std::string>>& known_keys() {
    static const std::map<std::string, std::vector<std::string>> keys = [] {
        std::map<std::string, std::vector<std::string>> k = {
            {"run", {"command", "output_dir", "prefix"}},
            {"waiting_time", {"t_min", "t_max", "count"}},
            {"spectrum", {"transition", "delta_min", "delta_max", "count", "n_bar", "exact"}},
            {"cooling_scan", {"parameter", "start", "stop", "count"}},
            {"trajectory", {"duration", "seed", "dark_threshold"}},
        };
        k["system"] = SystemParams::real_field_names();
        k["system"].push_back("n_fock");
        return k;
    }();
    return keys;
}

void check_unknown(const pt::ptree& tree, Problems& pr) {
    for (const auto& [section, node] : tree) {
        if (node.empty()) {
            if (section != "units") pr.invalid.push_back(section + " (unknown top-level key)");
            continue;
        }
        if (section == "tolerances") continue;
        const auto it = known_keys().find(section);
        if (it == known_keys().end()) {
            pr.invalid.push_back("[" + section + "] (unknown section)");
            continue;
        }
        for (const auto& [key, child] : node)
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
                pr.invalid.push_back(section + "." + key + " (unknown key)");
    }
}

const std::vector<std::string> kCommands = {"waiting-time", "spectrum", "cooling-scan", "trajectory", "validate"};

}  // namespace

double parse_real(const std::string& raw) {
    const std::string text = trim(raw);
    static const std::regex pi_form(R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?\s*\*\s*)?([+-]?)pi(?:\s*/\s*(\d+\.?\d*))?$)");
    std::smatch m;
    if (std::regex_match(text, m, pi_form)) {
        double v = std::numbers::pi;
        if (m[1].matched) v *= std::stod(m[1].str().substr(0, m[1].str().find('*')));
        if (m[2].str() == "-") v = -v;
        if (m[3].matched) v /= std::stod(m[3].str());
        return v;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("'" + text + "' is not a number");
    }
    if (used != text.size()) throw ConfigError("'" + text + "' has trailing characters");
    return v;
}

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed configuration: ") + e.message() + " at line " +
                          std::to_string(e.line()));
    }

    RunConfig c;
    Problems pr;
    check_unknown(tree, pr);
    const auto units = tree.get_optional<std::string>("units");
    if (!units)
        pr.missing.push_back("units");
    else if (trim(*units) != kUnits)
        pr.invalid.push_back("units ('" + trim(*units) + "', expected '" + kUnits + "')");

    for (const auto& name : SystemParams::real_field_names()) {
        const std::string path = "system/" + name;
        if (!tree.get_optional<std::string>(pt::ptree::path_type(path, '/'))) {
            pr.missing.push_back("system." + name);
            continue;
        }
        read_optional(tree, path, pr, [&](const std::string& v) { c.params.set(name, parse_real(v)); });
    }
    if (!tree.get_optional<std::string>(pt::ptree::path_type("system/n_fock", '/')))
        pr.missing.push_back("system.n_fock");
    read_optional(tree, "system/n_fock", pr, [&](const std::string& v) { c.params.n_fock = parse_int(v); });

    read_optional(tree, "run/command", pr, [&](const std::string& v) {
        if (std::find(kCommands.begin(), kCommands.end(), v) == kCommands.end()) throw std::invalid_argument(v);
        c.command = v;
    });
    read_optional(tree, "run/output_dir", pr, [&](const std::string& v) { c.output_dir = v; });
    read_optional(tree, "run/prefix", pr, [&](const std::string& v) { c.prefix = v; });

    auto& w = c.waiting_time;
    read_optional(tree, "waiting_time/t_min", pr, [&](const std::string& v) { w.t_min = parse_real(v); });
    read_optional(tree, "waiting_time/t_max", pr, [&](const std::string& v) { w.t_max = parse_real(v); });
    read_optional(tree, "waiting_time/count", pr, [&](const std::string& v) { w.count = parse_int(v); });

    auto& s = c.spectrum;
    read_optional(tree, "spectrum/transition", pr, [&](const std::string& v) {
        s.transition = parse_int(v);
        if (s.transition != 1 && s.transition != 2) throw std::invalid_argument(v);
    });
    read_optional(tree, "spectrum/delta_min", pr, [&](const std::string& v) { s.delta_min = parse_real(v); });
    read_optional(tree, "spectrum/delta_max", pr, [&](const std::string& v) { s.delta_max = parse_real(v); });
    read_optional(tree, "spectrum/count", pr, [&](const std::string& v) { s.count = parse_int(v); });
    read_optional(tree, "spectrum/n_bar", pr, [&](const std::string& v) { s.n_bar = parse_real(v); });
    read_optional(tree, "spectrum/exact", pr, [&](const std::string& v) { s.exact = parse_bool(v); });

    auto& sc = c.scan;
    read_optional(tree, "cooling_scan/parameter", pr, [&](const std::string& v) {
        (void)c.params.get(v);
        sc.parameter = v;
    });
    read_optional(tree, "cooling_scan/start", pr, [&](const std::string& v) { sc.start = parse_real(v); });
    read_optional(tree, "cooling_scan/stop", pr, [&](const std::string& v) { sc.stop = parse_real(v); });
    read_optional(tree, "cooling_scan/count", pr, [&](const std::string& v) { sc.count = parse_int(v); });

    auto& t = c.trajectory;
    read_optional(tree, "trajectory/duration", pr, [&](const std::string& v) { t.duration = parse_real(v); });
    read_optional(tree, "trajectory/seed", pr, [&](const std::string& v) {
        std::size_t used = 0;
        t.seed = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
    });
    read_optional(tree, "trajectory/dark_threshold", pr,
                  [&](const std::string& v) { t.dark_threshold = parse_real(v); });

    if (const auto tol = tree.get_child_optional("tolerances"))
        for (const auto& [key, node] : *tol)
            read_optional(tree, "tolerances/" + key, pr, [&](const std::string& v) { c.tolerances[key] = parse_real(v); });

    pr.raise();

    // Option ranges.
    if (!(w.t_min > 0.0 && w.t_max > w.t_min && w.count >= 8)) pr.invalid.push_back("waiting_time (need 0 < t_min < t_max, count >= 8)");
    if (!(s.delta_max > s.delta_min && s.count >= 2)) pr.invalid.push_back("spectrum (need delta_min < delta_max, count >= 2)");
    if (s.n_bar && !(*s.n_bar >= 0.0)) pr.invalid.push_back("spectrum.n_bar (must be non-negative)");
    if (sc.count < 1) pr.invalid.push_back("cooling_scan.count (must be positive)");
    if (!(t.duration > 0.0)) pr.invalid.push_back("trajectory.duration (must be positive)");
    if (t.dark_threshold && !(*t.dark_threshold > 0.0)) pr.invalid.push_back("trajectory.dark_threshold (must be positive)");
    try {
        c.params.validate();
    } catch (const InvalidParams& e) {
        pr.invalid.push_back(std::string("system (") + e.what() + ")");
    }
    pr.raise();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "units = " << kUnits << "\n\n[run]\n";
    if (!c.command.empty()) os << "command = " << c.command << "\n";
    os << "output_dir = " << c.output_dir << "\nprefix = " << c.prefix << "\n\n[system]\n";
    for (const auto& name : SystemParams::real_field_names()) os << name << " = " << format_real(c.params.get(name)) << "\n";
    os << "n_fock = " << c.params.n_fock << "\n\n[waiting_time]\n";
    os << "t_min = " << format_real(c.waiting_time.t_min) << "\nt_max = " << format_real(c.waiting_time.t_max)
       << "\ncount = " << c.waiting_time.count << "\n\n[spectrum]\n";
    os << "transition = " << c.spectrum.transition << "\ndelta_min = " << format_real(c.spectrum.delta_min)
       << "\ndelta_max = " << format_real(c.spectrum.delta_max) << "\ncount = " << c.spectrum.count << "\n";
    if (c.spectrum.n_bar) os << "n_bar = " << format_real(*c.spectrum.n_bar) << "\n";
    os << "exact = " << (c.spectrum.exact ? "true" : "false") << "\n\n[cooling_scan]\n";
    os << "parameter = " << c.scan.parameter << "\nstart = " << format_real(c.scan.start)
       << "\nstop = " << format_real(c.scan.stop) << "\ncount = " << c.scan.count << "\n\n[trajectory]\n";
    os << "duration = " << format_real(c.trajectory.duration) << "\nseed = " << c.trajectory.seed << "\n";
    if (c.trajectory.dark_threshold) os << "dark_threshold = " << format_real(*c.trajectory.dark_threshold) << "\n";
    if (!c.tolerances.empty()) {
        os << "\n[tolerances]\n";
        for (const auto& [k, v] : c.tolerances) os << k << " = " << format_real(v) << "\n";
    }
    return os.str();
}

void apply_override(RunConfig& c, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not of the form key=value");
    std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    if (key.find('.') == std::string::npos) key = "system." + key;
    // Round-trip through the text form so overrides get the same validation.
    std::string text = serialize_config(c);
    const std::string section = key.substr(0, key.find('.'));
    const std::string name = key.substr(key.find('.') + 1);
    const std::string header = "[" + section + "]\n";
    const auto at = text.find(header);
    const std::string line = name + " = " + value + "\n";
    if (at == std::string::npos) {
        text += "\n" + header + line;
    } else {
        // Drop an existing assignment of the same key inside the section.
        const std::size_t body = at + header.size();
        std::size_t end = text.find("\n[", body);
        if (end == std::string::npos) end = text.size();
        std::string block = text.substr(body, end - body);
        std::istringstream lines(block);
        std::string kept, l;
        while (std::getline(lines, l)) {
            const auto e = l.find('=');
            if (e != std::string::npos && trim(l.substr(0, e)) == name) continue;
            kept += l + "\n";
        }
        text = text.substr(0, body) + line + kept + text.substr(end);
    }
    c = parse_config(text);
}

}  // namespace qjumps::app
