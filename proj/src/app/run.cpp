#include "qjumps/app/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>

#include <json.hpp>

#include "qjumps/app/output.hpp"
#include "qjumps/cooling.hpp"
#include "qjumps/errors.hpp"
#include "qjumps/internal.hpp"
#include "qjumps/jumps.hpp"
#include "qjumps/linalg.hpp"
#include "qjumps/liouville.hpp"
#include "qjumps/spectrum.hpp"

namespace qjumps::app {

bool RunSummary::checks_passed() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string RunSummary::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["version"] = version;
    j["config_hash"] = config_hash;
    j["wall_seconds"] = wall_seconds;
    j["scalars"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : scalars) j["scalars"][k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
    j["outputs"] = outputs;
    if (!checks.empty()) {
        j["checks"] = nlohmann::ordered_json::array();
        for (const auto& c : checks)
            j["checks"].push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
        j["checks_passed"] = checks_passed();
    }
    return j.dump(2) + "\n";
}

namespace {

std::string artifact(const RunConfig& c, const std::string& suffix) {
    return (std::filesystem::path(c.output_dir) / (c.prefix + "_" + suffix)).string();
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

double tolerance(const RunConfig& c, const std::string& name, double fallback) {
    const auto it = c.tolerances.find(name);
    return it == c.tolerances.end() ? fallback : it->second;
}

void add_check(RunSummary& s, const RunConfig& c, const std::string& name, double value, double fallback) {
    const double tol = tolerance(c, name, fallback);
    s.checks.push_back({name, value, tol, std::isfinite(value) && value <= tol});
}

struct Telegraph {
    WaitingTimeResult w;
    std::vector<double> perturbative;
    SplitTime split;
    double T_B = 0.0, T_D = 0.0;
};

Telegraph telegraph(const RunConfig& c) {
    const auto& o = c.waiting_time;
    Telegraph t;
    t.w = waiting_time(c.params, waiting_time_grid(o.t_min, o.t_max, o.count));
    t.perturbative = perturbative_waiting_time(c.params, t.w.n_bar, t.w.times);
    t.split = split_time(t.w);
    std::tie(t.T_B, t.T_D) = bright_dark_periods(t.w, t.split.tau, t.split.fit.t_slow);
    return t;
}

void telegraph_scalars(RunSummary& s, const RunConfig& c, const Telegraph& t) {
    const auto a = analytic_scales(c.params, t.w.n_bar);
    s.scalars["n_bar"] = t.w.n_bar;
    s.scalars["saturation"] = a.saturation;
    s.scalars["tau"] = t.split.tau;
    s.scalars["tau_geometric"] = t.split.tau_geometric;
    s.scalars["fit_t_fast"] = t.split.fit.t_fast;
    s.scalars["fit_t_slow"] = t.split.fit.t_slow;
    s.scalars["fit_fast_weight"] = t.split.fit.A;
    s.scalars["fit_slow_weight"] = t.split.fit.B;
    s.scalars["T_B"] = t.T_B;
    s.scalars["T_D"] = t.T_D;
    s.scalars["T_B_analytic"] = a.T_B;
    s.scalars["T_B_small_s"] = a.T_B_small_s;
    s.scalars["T_D_analytic"] = a.T_D;
    s.scalars["overlay_log_deviation"] = max_log_deviation(t.w, t.perturbative, 3.0 / c.params.gamma2);
}

void run_waiting_time(const RunConfig& c, RunSummary& s) {
    const Telegraph t = telegraph(c);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < t.w.times.size(); ++i) rows.push_back({t.w.times[i], t.w.P[i], t.perturbative[i]});
    const std::string path = artifact(c, "waiting_time.csv");
    write_csv(path, {"t", "P_exact", "P_perturbative"}, rows, s.config_hash);
    s.outputs.push_back(path);
    telegraph_scalars(s, c, t);
}

void run_spectrum(const RunConfig& c, RunSummary& s) {
    const auto& o = c.spectrum;
    const SystemParams& p = c.params;
    const CoolingRates rates = cooling_rates(p);
    if (o.transition == 2) {
        try {
            (void)analytic_scales(p, rates.n_bar);
        } catch (const InfiniteBright& e) {
            throw InfiniteBright(std::string("the g-e2 spectrum has no motional signal: ") + e.what());
        }
    }
    const auto grid = linspace(o.delta_min, o.delta_max, o.count);
    const auto so = second_order_spectrum(p, o.transition, o.n_bar, grid);
    const auto& r = so.result;

    const std::string tag = "spectrum" + std::to_string(o.transition);
    const std::vector<std::string> names = {component::elastic_correction, component::sideband_red,
                                            component::sideband_blue, component::inelastic_zero,
                                            component::inelastic_second};
    std::vector<std::vector<double>> curves;
    for (const auto& n : names) curves.push_back(r.component_or_zero(n));
    std::vector<std::vector<double>> rows;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        std::vector<double> row{grid[g], r.total[g]};
        for (const auto& cv : curves) row.push_back(cv[g]);
        rows.push_back(row);
    }
    const std::string path = artifact(c, tag + ".csv");
    write_csv(path, {"delta_omega", "total", "elastic_correction", "sb_red", "sb_blue", "inel_0", "inel_2"}, rows,
              s.config_hash);
    s.outputs.push_back(path);

    s.scalars["n_bar"] = so.n_bar;
    s.scalars["saturation"] = saturation(p);
    s.scalars["elastic_weight"] = r.elastic_weight;
    s.scalars["gamma_sb"] = 0.5 * rates.W_total;
    for (const auto& n : names) s.scalars["weight_" + n] = r.component_weight(n).real();

    if (o.transition == 1) {
        const auto cp = central_peak_transition1(p, rates.n_bar, grid);
        s.scalars["central_peak_hwhm"] = cp.hwhm;
        s.scalars["central_peak_weight"] = cp.weight;
        s.scalars["central_peak_weight_small_s"] = cp.weight_small_s;
        s.scalars["central_peak_height_telegraph"] = cp.height_telegraph;
        // Perturbative weight at λ = -γ2 and the share of its subdominant term.
        Complex total = 0.0, dominant = 0.0, subdominant = 0.0;
        const auto& terms = second_order_terms();
        for (const auto& pole : so.poles) {
            if (pole.line.internal_index != static_cast<int>(InternalMode::decay) || pole.line.ell != 0) continue;
            total += pole.line.weight;
            for (std::size_t t = 0; t < terms.size(); ++t) {
                const auto& ti = terms[t];
                if (ti.dipole_left == 0 && ti.dipole_right == 0 && ti.projector == 2 && ti.state == 0) dominant += pole.terms[t];
                if (ti.dipole_left == 0 && ti.dipole_right == 0 && ti.projector == 1 && ti.state == 1) subdominant += pole.terms[t];
            }
        }
        s.scalars["central_peak_weight_numerical"] = total.real();
        s.scalars["central_peak_subdominant_ratio"] = std::abs(subdominant) / std::abs(dominant);
    } else {
        const auto t2 = transition2_signals(p, rates.n_bar, grid);
        s.scalars["sideband_blue_weight"] = t2.weight_blue;
        s.scalars["sideband_red_weight"] = t2.weight_red;
        s.scalars["sideband_blue_weight_small_s"] = t2.weight_blue_small_s;
        s.scalars["sideband_red_weight_small_s"] = t2.weight_red_small_s;
        s.scalars["pedestal_weight"] = t2.pedestal_weight.real();
        s.scalars["pedestal_width"] = -t2.pedestal_lambda.real();
        s.scalars["pedestal_center"] = t2.pedestal_lambda.imag();
        s.scalars["pedestal_height"] = t2.pedestal_height;
        s.scalars["pedestal_height_telegraph"] = t2.pedestal_height_telegraph;
    }

    if (o.exact) {
        const auto L = build_liouvillian(p);
        const auto rho = steady_state(L);
        const auto decomposition = spectral_decomposition(L);
        const auto exact = correlation_spectrum(decomposition, DipoleOperator::make(p, o.transition).full, rho, grid);
        std::vector<std::vector<double>> erows;
        for (std::size_t g = 0; g < grid.size(); ++g) erows.push_back({grid[g], exact.total[g]});
        const std::string epath = artifact(c, tag + "_exact.csv");
        write_csv(epath, {"delta_omega", "total"}, erows, s.config_hash);
        s.outputs.push_back(epath);
        s.scalars["elastic_weight_exact"] = exact.elastic_weight;
    }
}

void run_cooling_scan(const RunConfig& c, RunSummary& s) {
    const auto values = linspace(c.scan.start, c.scan.stop, c.scan.count);
    const auto rows = scan_mean_phonon(c.params, c.scan.parameter, values);
    std::vector<std::vector<double>> out;
    const double nan = std::nan("");
    int failed = 0;
    for (const auto& r : rows) {
        if (!r.ok) ++failed;
        out.push_back({r.value, r.ok ? r.n1 : nan, r.ok ? r.n2 : nan, r.ok ? r.n_bar : nan, r.ok ? r.W1 : nan,
                       r.ok ? r.W2 : nan, r.n2_sideband_limit, r.ok ? 1.0 : 0.0});
    }
    const std::string path = artifact(c, "cooling_scan.csv");
    write_csv(path, {c.scan.parameter, "n1", "n2", "n_bar", "W1", "W2", "n2_sideband_limit", "ok"}, out, s.config_hash);
    s.outputs.push_back(path);
    s.scalars["rows"] = static_cast<double>(rows.size());
    s.scalars["failed_rows"] = failed;
    double best = std::numeric_limits<double>::infinity(), at = nan;
    for (const auto& r : rows)
        if (r.ok && r.n_bar < best) {
            best = r.n_bar;
            at = r.value;
        }
    s.scalars["n_bar_min"] = best;
    s.scalars["n_bar_argmin"] = at;
}

void run_trajectory(const RunConfig& c, RunSummary& s) {
    const auto& o = c.trajectory;
    const auto& wo = c.waiting_time;
    const auto w = waiting_time(c.params, waiting_time_grid(wo.t_min, wo.t_max, wo.count));
    // Without two separated time scales there is no dark level to detect.
    double threshold = std::numeric_limits<double>::infinity();
    if (o.dark_threshold) {
        threshold = *o.dark_threshold;
    } else {
        try {
            threshold = split_time(w).tau;
        } catch (const NoTimescaleSeparation&) {
        }
    }
    const auto rec = simulate_trajectory(c.params, o.duration, o.seed, threshold);

    std::vector<std::vector<double>> ev;
    for (const auto& e : rec.events) ev.push_back({e.time, double(e.transition), e.u});
    const std::string epath = artifact(c, "trajectory_events.csv");
    write_csv(epath, {"time", "transition", "u"}, ev, s.config_hash);
    std::vector<std::vector<double>> per;
    for (const auto& q : rec.periods) per.push_back({q.start, q.end, q.bright ? 1.0 : 0.0, q.censored ? 1.0 : 0.0});
    const std::string ppath = artifact(c, "trajectory_periods.csv");
    write_csv(ppath, {"start", "end", "bright", "censored"}, per, s.config_hash);
    s.outputs.push_back(epath);
    s.outputs.push_back(ppath);

    auto stats = [](const std::vector<double>& v) {
        double m = 0, q = 0;
        for (double x : v) m += x;
        m /= std::max<std::size_t>(v.size(), 1);
        for (double x : v) q += (x - m) * (x - m);
        const double sd = v.size() > 1 ? std::sqrt(q / (v.size() - 1)) : 0.0;
        return std::pair{m, v.empty() ? 0.0 : sd / std::sqrt(double(v.size()))};
    };
    const auto dark = rec.durations(false);
    const auto bright = rec.durations(true);
    const auto [dm, dse] = stats(dark);
    const auto [bm, bse] = stats(bright);
    s.scalars["dark_threshold"] = threshold;
    s.scalars["events"] = static_cast<double>(rec.events.size());
    s.scalars["dark_periods"] = static_cast<double>(dark.size());
    s.scalars["dark_mean"] = dm;
    s.scalars["dark_stderr"] = dse;
    s.scalars["bright_periods"] = static_cast<double>(bright.size());
    s.scalars["bright_mean"] = bm;
    s.scalars["bright_stderr"] = bse;
    s.scalars["gamma2_inverse"] = 1.0 / c.params.gamma2;
    const auto gaps = rec.inter_click_gaps();
    s.scalars["ks_distance"] = gaps.empty() ? std::nan("") : ks_distance(gaps, w);
}

void run_validate(const RunConfig& c, RunSummary& s) {
    const SystemParams& p = c.params;

    const auto L = build_liouvillian(p);
    const Matrix id = Matrix::Identity(L.dims().dim(), L.dims().dim());
    const double trace_err = (linalg::vec(id).transpose() * L.data()).cwiseAbs().maxCoeff();
    add_check(s, c, "trace_preservation", trace_err, 1e-10);

    const auto rho = steady_state(L);
    Eigen::SelfAdjointEigenSolver<Matrix> ev(rho.data());
    add_check(s, c, "steady_state_positivity", std::max(0.0, -ev.eigenvalues().minCoeff()), 1e-8);
    const double n_full = partial_trace_atom(number(L.dims()) * rho).trace().real();

    const auto es = internal_eigensystem(p);
    const Matrix pairing = es.dual_matrix() * es.right_matrix();
    add_check(s, c, "internal_biorthonormality", (pairing - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff(), 1e-10);

    const auto rule = linalg::gauss_legendre(kDefaultQuadratureOrder);
    double moment = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        moment += rule.weights[i] * dipole_pattern(rule.nodes[i]) * rule.nodes[i] * rule.nodes[i];
    add_check(s, c, "pattern_second_moment", std::abs(moment - 0.4), 1e-12);

    const auto rates = cooling_rates(p);
    const RealVector pn = rate_equation_stationary(rates, p.n_fock);
    // Residual of the truncated birth-death generator, relative to its largest rate.
    const int top = p.n_fock - 1;
    double balance = 0.0;
    for (int n = 0; n <= top; ++n) {
        double flow = -pn(n) * (rates.A_minus() * n + (n < top ? rates.A_plus() * (n + 1) : 0.0));
        if (n > 0) flow += pn(n - 1) * rates.A_plus() * n;
        if (n < top) flow += pn(n + 1) * rates.A_minus() * (n + 1);
        balance = std::max(balance, std::abs(flow));
    }
    balance /= std::abs(rates.A_minus()) * p.n_fock;
    add_check(s, c, "detailed_balance", balance, 1e-10);

    const Telegraph t = telegraph(c);
    telegraph_scalars(s, c, t);
    add_check(s, c, "waiting_time_overlay", s.scalars["overlay_log_deviation"], 0.15);
    s.scalars["n_bar_full"] = n_full;
    s.scalars["gamma2_inverse"] = 1.0 / p.gamma2;
}

}  // namespace

RunSummary run(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    RunSummary s;
    s.command = config.command;
    s.config_hash = config_hash(config);
    if (config.command == "waiting-time")
        run_waiting_time(config, s);
    else if (config.command == "spectrum")
        run_spectrum(config, s);
    else if (config.command == "cooling-scan")
        run_cooling_scan(config, s);
    else if (config.command == "trajectory")
        run_trajectory(config, s);
    else if (config.command == "validate")
        run_validate(config, s);
    else
        throw ConfigError("no command given; expected one of waiting-time, spectrum, cooling-scan, trajectory, validate");
    s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::string suffix = config.command == "spectrum" ? "spectrum" + std::to_string(config.spectrum.transition)
                                                            : config.command;
    const std::string path = artifact(config, suffix + ".json");
    s.outputs.push_back(path);
    write_atomic(path, s.to_json());
    return s;
}

}  // namespace qjumps::app
