#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "qjumps/cooling.hpp"
#include "qjumps/errors.hpp"
#include "qjumps/internal.hpp"
#include "qjumps/liouville.hpp"
#include "qjumps/spectrum.hpp"

using namespace qjumps;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
    return g;
}

// Grid on [a, b] plus dense patches around the given centres.
std::vector<double> patched_grid(double a, double b, int n, const std::vector<double>& centres, double half, int m) {
    std::vector<double> g = linspace(a, b, n);
    for (double c : centres)
        for (double x : linspace(c - half, c + half, m))
            if (x >= a && x <= b) g.push_back(x);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

int count_local_maxima(const std::vector<double>& y, double floor) {
    int n = 0;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] > floor) ++n;
    return n;
}

double argmax_in(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi) {
    double best = -std::numeric_limits<double>::infinity(), at = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= lo && x[i] <= hi && y[i] > best) {
            best = y[i];
            at = x[i];
        }
    return at;
}

double abs_weight(const SpectrumResult& r, const std::string& component) {
    double s = 0.0;
    for (const auto& l : r.lines)
        if (l.component == component) s += std::abs(l.weight);
    return s;
}

// Worst |exact - perturbative| relative to the largest exact value within
// ±window, over the grid minus a ±excluded neighbourhood of the laser line.
double exact_deviation(const SystemParams& p, const std::vector<double>& grid, double window, double excluded) {
    const SuperOperator L = build_liouvillian(p);
    const SpectrumResult exact =
        correlation_spectrum(spectral_decomposition(L), DipoleOperator::make(p, 1).full, steady_state(L), grid);
    const SpectrumResult pert = second_order_spectrum(p, 1, std::nullopt, grid).result;
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(grid[i]) < excluded) continue;
        double local = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j)
            if (std::abs(grid[j] - grid[i]) <= window) local = std::max(local, std::abs(exact.total[j]));
        worst = std::max(worst, std::abs(exact.total[i] - pert.total[i]) / local);
    }
    return worst;
}

const std::vector<double>& sideband_grid() {
    static const std::vector<double> g = patched_grid(-2.0, 2.0, 4001, {-2.0, -1.0, 0.0, 1.0, 2.0}, 0.01, 1001);
    return g;
}

}  // namespace

TEST_CASE("zero-order spectrum") {
    const SystemParams p = SystemParams::reference();
    const auto grid = linspace(-3.0, 3.0, 601);

    const SpectrumResult s2 = zero_order_spectrum(p, 2, grid);
    for (double v : s2.total) CHECK(v == 0.0);
    CHECK(s2.elastic_weight == 0.0);

    const SpectrumResult s1 = zero_order_spectrum(p, 1, grid);
    Complex total = 0.0;
    for (const auto& l : s1.lines) total += l.weight;
    const double rho11 = internal_steady_state(p).rho(1, 1).real();
    CHECK(std::abs(total - rho11) < 1e-12);
    CHECK(s1.elastic_weight > 0.0);
    for (double v : s1.total) CHECK(std::isfinite(v));
}

TEST_CASE("strong drive gives three peaks") {
    SystemParams p = SystemParams::reference();
    p.delta1 = 0.0;
    p.omega1 = 10.0 * p.gamma1;
    const auto grid = linspace(-400.0, 400.0, 8001);
    const SpectrumResult s = zero_order_spectrum(p, 1, grid);
    const double top = *std::max_element(s.total.begin(), s.total.end());
    CHECK(count_local_maxima(s.total, 1e-3 * top) == 3);
    CHECK(std::abs(argmax_in(grid, s.total, -20.0, 20.0)) < 1.0);
    CHECK(std::abs(argmax_in(grid, s.total, 20.0, 400.0) - p.omega1) < 2.0);
    CHECK(std::abs(argmax_in(grid, s.total, -400.0, -20.0) + p.omega1) < 2.0);
}

TEST_CASE("term enumeration") {
    const auto& terms = second_order_terms();
    std::set<std::array<int, 4>> seen;
    for (const auto& t : terms) {
        CHECK(t.dipole_left + t.projector + t.dipole_right + t.state == 2);
        for (int v : {t.dipole_left, t.projector, t.dipole_right, t.state}) CHECK(v >= 0);
        seen.insert({t.dipole_left, t.projector, t.dipole_right, t.state});
    }
    CHECK(seen.size() == 10);
}

TEST_CASE("dipole expansion") {
    SystemParams p = SystemParams::reference();
    p.n_fock = 10;
    const DipoleOperator d = DipoleOperator::make(p, 1);
    CHECK(d.eta_projected == doctest::Approx(p.eta1 * std::cos(p.psi)));
    const Matrix sum = d.orders[0].data() + d.orders[1].data() + d.orders[2].data();
    const int n = p.n_fock;
    // Agreement to third order on the low Fock states.
    const double err = (d.full.data() - sum).block(0, n, n - 3, n - 3).cwiseAbs().maxCoeff();
    CHECK(err < 10.0 * std::pow(std::abs(d.eta_projected), 3));
    CHECK_THROWS_AS(DipoleOperator::make(p, 3), InvalidParams);
}

TEST_CASE("transition 1 second-order spectrum") {
    const SystemParams p = SystemParams::reference();
    const auto& grid = sideband_grid();
    const SecondOrderSpectrum s = second_order_spectrum(p, 1, std::nullopt, grid);
    const auto& t = s.result.total;
    // Fock truncation of the rate-equation populations.
    CHECK(std::abs(s.n_bar - cooling_rates(p).n_bar) < 1e-7);

    // Two motional sidebands and a narrow central peak.
    for (double c : {-1.0, 0.0, 1.0}) {
        CHECK(std::abs(argmax_in(grid, t, c - 0.2, c + 0.2) - c) < 0.01);
    }
    CHECK(s.result.component_weight(component::sideband_red).real() > 0.0);
    CHECK(s.result.component_weight(component::sideband_blue).real() > 0.0);
    for (double v : t) CHECK(std::isfinite(v));

    // Every pole weight is the sum of its ten trace terms.
    for (const auto& pole : s.poles) {
        Complex sum = 0.0;
        for (const auto& v : pole.terms) sum += v;
        CHECK(std::abs(sum - pole.line.weight) <= 1e-14 * (1.0 + std::abs(sum)));
    }
}

TEST_CASE("transition 2 second-order spectrum") {
    const SystemParams p = SystemParams::reference();
    const auto& grid = sideband_grid();
    const SecondOrderSpectrum s = second_order_spectrum(p, 2, std::nullopt, grid);
    const double blue = s.result.component_weight(component::sideband_blue).real();
    const double red = s.result.component_weight(component::sideband_red).real();
    CHECK(blue / red > 30.0);
    CHECK(s.result.component_weight(component::inelastic_second).real() > 0.0);
    CHECK(s.result.elastic_weight == 0.0);
    CHECK(std::abs(argmax_in(grid, s.result.total, 0.5, 1.5) - 1.0) < 0.01);

    const Transition2Signals sig = transition2_signals(p, s.n_bar, grid);
    CHECK(std::abs(blue / sig.weight_blue - 1.0) < 1e-3);
    CHECK(std::abs(red / sig.weight_red - 1.0) < 1e-3);
    const double pedestal = s.result.component_weight(component::inelastic_second).real();
    CHECK(std::abs(pedestal / sig.pedestal_weight.real() - 1.0) < 0.10);
}

TEST_CASE("no recoil means no second-order signal") {
    SystemParams p = SystemParams::reference();
    p.eta1 = p.eta2 = 0.0;
    p.n_fock = 8;
    // Without recoil the sideband poles are undamped; keep the grid off them.
    const auto grid = linspace(-2.013, 1.987, 81);
    for (int j : {1, 2}) {
        const SecondOrderSpectrum s = second_order_spectrum(p, j, 0.3, grid);
        for (const auto& pole : s.poles) CHECK(std::abs(pole.line.weight) < 1e-15);
        const SpectrumResult zero = zero_order_spectrum(p, j, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            CHECK(std::abs(s.result.total[i] - zero.total[i]) <= 1e-15 * (1.0 + std::abs(zero.total[i])));
    }
}

TEST_CASE("second-order weights scale as eta squared") {
    const std::vector<double> etas = {0.02, 0.05, 0.1};
    const auto grid = linspace(-2.0, 2.0, 11);
    const std::vector<std::string> names = {component::sideband_red, component::sideband_blue,
                                            component::inelastic_second};
    for (int j : {1, 2}) {
        std::vector<std::vector<double>> w(names.size());
        for (double eta : etas) {
            SystemParams p = SystemParams::reference();
            p.eta1 = p.eta2 = eta;
            const SecondOrderSpectrum s = second_order_spectrum(p, j, std::nullopt, grid);
            for (std::size_t c = 0; c < names.size(); ++c) w[c].push_back(abs_weight(s.result, names[c]));
        }
        for (std::size_t c = 0; c < names.size(); ++c) {
            if (w[c][0] == 0.0) continue;  // component absent for this transition
            const double e01 = std::log(w[c][1] / w[c][0]) / std::log(etas[1] / etas[0]);
            const double e12 = std::log(w[c][2] / w[c][1]) / std::log(etas[2] / etas[1]);
            INFO("transition " << j << " component " << names[c]);
            CHECK(std::abs(e01 - 2.0) < 0.1);
            CHECK(std::abs(e12 - 2.0) < 0.1);
        }
    }
}

TEST_CASE("motional relaxation modes carry no elastic weight") {
    // D0 leaves the motion alone, so only the stationary motional mode of the
    // laser-line cluster is seen; the others are rounding residue.
    const SystemParams p = SystemParams::reference();
    const SecondOrderSpectrum s = second_order_spectrum(p, 1, std::nullopt, {0.0});
    int count = 0;
    for (const auto& l : s.result.lines)
        if (l.component == component::elastic_correction) {
            ++count;
            CHECK(std::abs(l.weight) < 1e-15);
            CHECK(l.lambda.real() < 0.0);
        }
    CHECK(count > 0);
}

TEST_CASE("central peak of transition 1") {
    const SystemParams p = SystemParams::reference();
    const double n_bar = cooling_rates(p).n_bar;
    const auto grid = linspace(-0.1, 0.1, 2001);
    const CentralPeak cp = central_peak_transition1(p, n_bar, grid);
    CHECK(cp.hwhm == doctest::Approx(p.gamma2).epsilon(1e-14));

    // Half maximum of the closed-form curve sits at ±γ2.
    const std::size_t mid = grid.size() / 2;
    const double top = cp.curve[mid];
    const double at_hw = cp.curve[mid + static_cast<std::size_t>(std::lround(p.gamma2 / (grid[1] - grid[0])))];
    CHECK(at_hw == doctest::Approx(0.5 * top).epsilon(1e-9));
    CHECK(top == doctest::Approx(cp.weight / p.gamma2).epsilon(1e-12));

    // Telegraph estimate of the height within the small-saturation error.
    const double s = saturation(p);
    CHECK(std::abs(cp.height_telegraph / (cp.weight / p.gamma2) - 1.0) < 2.0 * s);
    CHECK(std::abs(cp.weight_small_s / cp.weight - 1.0) < 2.0 * s);
}

TEST_CASE("transition 2 closed forms") {
    const SystemParams p = SystemParams::reference();
    const CoolingRates r = cooling_rates(p);
    const auto grid = linspace(-1.5, 1.5, 301);
    const Transition2Signals t = transition2_signals(p, r.n_bar, grid);

    CHECK(std::abs(t.gamma_sb - 0.5 * r.W_total) <= 1e-12 * t.gamma_sb);
    CHECK(t.weight_blue / t.weight_red > 30.0);
    CHECK(t.weight_blue_small_s / t.weight_red_small_s > 30.0);
    CHECK(std::abs(t.weight_blue_small_s / t.weight_blue - 1.0) < 0.05);
    CHECK(std::abs(t.weight_red_small_s / t.weight_red - 1.0) < 0.05);
    CHECK(std::abs(t.pedestal_height_telegraph / t.pedestal_height - 1.0) < 0.30);
    CHECK(t.pedestal_height == doctest::Approx(t.pedestal_weight.real() / std::abs(t.pedestal_lambda.real())));
    const InternalEigensystem es = internal_eigensystem(p);
    CHECK(std::abs(t.pedestal_lambda - es.mode(InternalMode::one_minus).lambda) < 1e-14);

    SystemParams perpendicular = p;
    perpendicular.phi2 = std::numbers::pi / 2.0;
    CHECK_THROWS_AS(transition2_signals(perpendicular, r.n_bar, grid), InfiniteBright);
}

TEST_CASE("sideband asymmetry and phonon balance") {
    const SystemParams p = SystemParams::reference();
    const CoolingRates r = cooling_rates(p);
    const double n = r.n_bar;
    // Net phonon flux of the two channels cancels in the stationary state.
    const double net1 = r.A1_minus * n - r.A1_plus * (n + 1.0);
    const double net2 = r.A2_minus * n - r.A2_plus * (n + 1.0);
    CHECK(std::abs(net1 + net2) < 1e-12 * std::abs(net1));
    CHECK(net1 < 0.0);
    CHECK(net2 > 0.0);

    // Each transition's blue/red sideband ratio follows its own channel.
    const auto grid = linspace(-2.0, 2.0, 11);
    for (int j : {1, 2}) {
        const SpectrumResult s = second_order_spectrum(p, j, std::nullopt, grid).result;
        const double ratio = s.component_weight(component::sideband_blue).real() /
                             s.component_weight(component::sideband_red).real();
        const double channel = j == 1 ? r.A1_minus * n / (r.A1_plus * (n + 1.0))
                                      : r.A2_minus * n / (r.A2_plus * (n + 1.0));
        INFO("transition " << j);
        CHECK(std::abs(ratio / channel - 1.0) < 0.10);
    }
}

TEST_CASE("angle laws") {
    const SystemParams p = SystemParams::reference();
    const AngleReport rep = angle_dependence_report(p, cooling_rates(p).n_bar);
    REQUIRE(rep.phi_rows.size() == 10);
    CHECK(rep.r2_central_peak > 0.999);
    CHECK(rep.r2_transition2 > 0.999);
    CHECK(rep.psi_variation < 1e-8);
    const AngleRow& perpendicular = rep.phi_rows.back();
    CHECK(perpendicular.phi2 == doctest::Approx(std::numbers::pi / 2.0));
    const AngleRow& parallel = rep.phi_rows.front();
    CHECK(std::abs(perpendicular.transition2_total) < 1e-12 * std::abs(parallel.transition2_total));
    CHECK(std::abs(perpendicular.blue) < 1e-12 * parallel.blue);
    CHECK(std::abs(perpendicular.red) < 1e-12 * parallel.red);

    CHECK(linear_r2({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0}) == doctest::Approx(1.0));
}

TEST_CASE("exact and perturbative spectra converge as eta shrinks") {
    // Largest pointwise gap relative to the local maximum of the exact curve.
    const auto& grid = sideband_grid();
    std::vector<double> worst;
    for (double eta : {0.02, 0.01}) {
        SystemParams p = SystemParams::reference();
        p.eta1 = p.eta2 = eta;
        p.n_fock = 10;
        worst.push_back(exact_deviation(p, grid, 0.05, 3.0 * p.gamma2));
    }
    CHECK(worst[1] < worst[0]);
    CHECK(worst[1] < 0.10);
}

TEST_CASE("exact and perturbative spectra agree at the reference point") {
    const SystemParams p = SystemParams::reference();
    const double worst = exact_deviation(p, sideband_grid(), 0.05, 3.0 * p.gamma2);
    CHECK(worst < 0.10);
}
