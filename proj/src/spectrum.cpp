#include "qjumps/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "qjumps/cooling.hpp"
#include "qjumps/errors.hpp"
#include "qjumps/internal.hpp"
#include "qjumps/jumps.hpp"
#include "qjumps/lamb_dicke.hpp"
#include "qjumps/parallel.hpp"

namespace qjumps {

namespace {

Level level_of(int transition) {
    if (transition == 1) return Level::e1;
    if (transition == 2) return Level::e2;
    throw InvalidParams("transition must be 1 or 2");
}

constexpr int kMaxEll = 2;

}  // namespace

DipoleOperator DipoleOperator::make(const SystemParams& p, int transition) {
    const Level lvl = level_of(transition);
    const SpaceDims dims{p.n_fock};
    const double eta = (transition == 1 ? p.eta1 : p.eta2) * std::cos(p.psi);
    Matrix lower = Matrix::Zero(3, 3);
    lower(0, static_cast<int>(lvl)) = 1.0;
    const Matrix x = fock_quadrature(p.n_fock);
    const QuadratureExponential ex(p.n_fock);
    DipoleOperator d{transition, p.psi, eta, embed(dims, lower, ex(-eta)),
                     {QOperator(dims), QOperator(dims), QOperator(dims)}};
    d.orders[0] = embed(dims, lower, Matrix::Identity(p.n_fock, p.n_fock));
    d.orders[1] = embed(dims, lower, -I_UNIT * eta * x);
    d.orders[2] = embed(dims, lower, (-0.5 * eta * eta) * (x * x));
    return d;
}

SpectrumResult zero_order_spectrum(const SystemParams& p, int transition, const std::vector<double>& grid) {
    const Level lvl = level_of(transition);
    const auto es = internal_eigensystem(p);
    const Matrix rho = internal_steady_state(p).rho;
    Matrix lower = Matrix::Zero(3, 3);
    lower(0, static_cast<int>(lvl)) = 1.0;
    const Matrix raised = lower.adjoint();
    const Matrix driven = lower * rho;

    SpectrumResult out;
    out.transition = transition;
    out.order = "zero";
    out.grid = grid;
    out.components[component::inelastic_zero] = {};
    for (int k = 0; k < kInternalModes; ++k) {
        const auto& m = es.modes[k];
        const Complex w = (raised * m.right).trace() * (m.left * driven).trace();
        const bool elastic = m.label == InternalMode::steady;
        if (elastic) out.elastic_weight = w.real();
        out.lines.push_back({m.lambda, w, elastic ? std::string("elastic") : component::inelastic_zero, k, 0});
    }
    out.render();
    return out;
}

const std::array<TermIndex, 10>& second_order_terms() {
    static const std::array<TermIndex, 10> terms = [] {
        std::array<TermIndex, 10> t{};
        int i = 0;
        for (int a = 0; a <= 2; ++a)
            for (int b = 0; b <= 2 - a; ++b)
                for (int c = 0; c <= 2 - a - b; ++c) t[i++] = {a, b, c, 2 - a - b - c};
        return t;
    }();
    return terms;
}

namespace {

// Evaluates the ten second-order traces for the poles of one zero-order cluster.
class PoleEvaluator {
public:
    PoleEvaluator(const PerturbationEngine& engine, const PerturbationEngine::SteadyExpansion& steady,
                  const DipoleOperator& dipole)
        : engine_(engine) {
        const QOperator* states[3] = {&steady.order0, &steady.order1, &steady.order2};
        driven_.resize(3);
        for (int c = 0; c <= 2; ++c)
            for (int d = 0; d <= 2 - c; ++d) driven_[c].push_back(dipole.orders[c] * *states[d]);
        for (int a = 0; a <= 2; ++a) raised_.push_back(dipole.orders[a].adjoint());
    }

    using Projector = std::function<QOperator(const QOperator&)>;

    // P0i is the projector onto the pole, P0c onto the whole cluster.
    SecondOrderTerms terms(const Cluster& cl, const Projector& p0i, const Projector& p0c) const {
        auto S = [&](const QOperator& x) { return engine_.resolvent(cl, x); };
        auto L1 = [&](const QOperator& x) { return engine_.L1(x); };
        auto L2 = [&](const QOperator& x) { return engine_.L2(x); };
        auto P1 = [&](const QOperator& z) { return S(L1(p0i(z))) + p0i(L1(S(z))); };
        auto M = [&](const QOperator& q) { return L1(S(S(L1(q)))); };
        auto P2 = [&](const QOperator& z) {
            const QOperator pz = p0i(z);
            const QOperator sz = S(z);
            QOperator r = S(L2(pz)) + p0i(L2(sz)) + S(L1(S(L1(pz)))) + p0i(L1(S(L1(sz)))) + S(L1(p0i(L1(sz))));
            r -= 0.5 * (p0i(M(p0c(z))) + p0c(M(pz)));
            return r;
        };
        SecondOrderTerms out{};
        const auto& idx = second_order_terms();
        for (std::size_t t = 0; t < idx.size(); ++t) {
            const auto& ti = idx[t];
            const QOperator& z = driven_[ti.dipole_right][ti.state];
            QOperator projected = ti.projector == 0 ? p0i(z) : ti.projector == 1 ? P1(z) : P2(z);
            out[t] = raised_[ti.dipole_left].trace_with(projected);
        }
        return out;
    }

private:
    const PerturbationEngine& engine_;
    std::vector<std::vector<QOperator>> driven_;  // D_c ϱ_d
    std::vector<QOperator> raised_;               // D_a†
};

Complex sum_terms(const SecondOrderTerms& t) {
    Complex s = 0.0;
    for (const auto& v : t) s += v;
    return s;
}

std::string classify(int k, int k0, int ell) {
    if (k != k0) return component::inelastic_second;
    if (ell > 0) return component::sideband_blue;
    if (ell < 0) return component::sideband_red;
    return component::elastic_correction;
}

struct ClusterFilter {
    std::optional<int> k;
    std::optional<int> ell;
    bool accepts(const Cluster& c) const { return (!k || *k == c.k) && (!ell || *ell == c.ell); }
};

std::vector<SecondOrderLine> second_order_poles(const PerturbationEngine& engine,
                                                const PerturbationEngine::SteadyExpansion& steady,
                                                const DipoleOperator& dipole, const ClusterFilter& filter) {
    const auto& frame = engine.frame();
    const int k0 = frame.stationary_mode();
    const PoleEvaluator eval(engine, steady, dipole);

    std::vector<Cluster> clusters;
    for (int k = 0; k < kInternalModes; ++k)
        for (int ell = -kMaxEll; ell <= kMaxEll; ++ell)
            if (filter.accepts({k, ell}) && !frame.rows(ell).empty()) clusters.push_back({k, ell});

    std::vector<std::vector<SecondOrderLine>> per_cluster(clusters.size());
    parallel_for(clusters.size(), [&](std::size_t ci) {
        const Cluster cl = clusters[ci];
        auto p0c = [&](const QOperator& x) { return engine.project(cl, x); };
        auto& out = per_cluster[ci];
        if (cl.k != k0) {
            SecondOrderLine line;
            line.terms = eval.terms(cl, p0c, p0c);
            line.line = {frame.eigenvalue(cl), sum_terms(line.terms), classify(cl.k, k0, cl.ell), cl.k, cl.ell};
            out.push_back(line);
            return;
        }
        const auto modes = engine.fine_modes(cl);
        Eigen::Index zero = -1;
        if (cl.ell == 0) modes.shifts.cwiseAbs().minCoeff(&zero);
        for (Eigen::Index i = 0; i < modes.shifts.size(); ++i) {
            auto p0i = [&](const QOperator& x) { return engine.project_mode(modes, static_cast<int>(i), x); };
            SecondOrderLine line;
            line.terms = eval.terms(cl, p0i, p0c);
            const std::string comp = i == zero ? std::string("elastic") : classify(cl.k, k0, cl.ell);
            line.line = {frame.eigenvalue(cl) + modes.shifts(i), sum_terms(line.terms), comp, cl.k, cl.ell};
            out.push_back(line);
        }
    });
    std::vector<SecondOrderLine> all;
    for (auto& v : per_cluster)
        for (auto& l : v) all.push_back(std::move(l));
    return all;
}

}  // namespace

SecondOrderSpectrum second_order_spectrum(const SystemParams& p, int transition, std::optional<double> n_bar,
                                          const std::vector<double>& grid) {
    p.validate();
    const PerturbationEngine engine(p);
    const auto steady = engine.steady_expansion(n_bar);
    const DipoleOperator dipole = DipoleOperator::make(p, transition);

    SecondOrderSpectrum out;
    const RealVector ns = RealVector::LinSpaced(p.n_fock, 0.0, p.n_fock - 1.0);
    out.n_bar = steady.motional.dot(ns);
    out.poles = second_order_poles(engine, steady, dipole, {});

    SpectrumResult zero = zero_order_spectrum(p, transition, grid);
    auto& r = out.result;
    r.transition = transition;
    r.order = "second";
    r.grid = grid;
    r.elastic_weight = zero.elastic_weight;
    for (const auto& name : {component::elastic_correction, component::sideband_red, component::sideband_blue,
                             component::inelastic_zero, component::inelastic_second})
        r.components[name] = {};
    r.lines = zero.lines;
    for (const auto& pole : out.poles) {
        if (pole.line.component == "elastic") r.elastic_weight += pole.line.weight.real();
        r.lines.push_back(pole.line);
    }
    r.render();
    return out;
}

CentralPeak central_peak_transition1(const SystemParams& p, double n_bar, const std::vector<double>& grid) {
    p.validate();
    const auto es = internal_eigensystem(p);
    const Matrix rho = internal_steady_state(p).rho;
    const double coupling = p.eta2 * std::cos(p.phi2) * p.omega2;
    const Complex w2c = std::conj(es.omega_2);

    // Dressed-state sum over σ = ±, with λ_{1σ} = -i(ω_σ - ω2*).
    double sum = 0.0;
    for (int s = 0; s < 2; ++s) {
        const Vector& ket = s == 0 ? es.ket_plus : es.ket_minus;
        const Vector& dual = s == 0 ? es.dual_plus : es.dual_minus;
        const Complex omega = s == 0 ? es.omega_plus : es.omega_minus;
        const Complex lam = -I_UNIT * (omega - w2c) + p.gamma2;
        const Complex amp = ket(0) * (dual.transpose() * rho.col(0))(0);  // <g|σ> <<σ|ρ|g>
        sum += (amp * ((2.0 * n_bar + 1.0) * lam - I_UNIT) / (lam * lam + 1.0)).real();
    }

    CentralPeak c;
    c.hwhm = p.gamma2;
    // The dressed-state sum is negative for a positive peak; its sign is fixed
    // by matching the perturbative weight and the small-s form.
    c.weight = -coupling * coupling / (2.0 * p.gamma2) * std::norm(rho(1, 0)) * sum;
    const double s = saturation(p);
    c.weight_small_s = coupling * coupling * n_bar / (p.gamma1 * p.gamma2) *
                       (1.0 - 2.0 * s + 2.0 * p.gamma2 / (s * p.gamma1));
    if (coupling != 0.0) {
        const auto a = analytic_scales(p, n_bar);
        c.height_telegraph = (a.T_D / a.T_B_small_s) * 0.5 * s / p.gamma2;
    }
    for (double d : grid) {
        const double lor = p.gamma2 / (d * d + p.gamma2 * p.gamma2);
        c.curve.push_back(c.weight * lor);
        c.curve_small_s.push_back(c.weight_small_s * lor);
    }
    return c;
}

Transition2Signals transition2_signals(const SystemParams& p, double n_bar, const std::vector<double>& grid) {
    p.validate();
    const auto a = analytic_scales(p, n_bar);  // InfiniteBright when uncoupled
    const auto es = internal_eigensystem(p);
    const Matrix rho = internal_steady_state(p).rho;
    const double coupling = p.eta2 * std::cos(p.phi2) * p.omega2;
    const double c2 = coupling * coupling;
    const Complex w2c = std::conj(es.omega_2);

    Complex sb_blue = 0.0, sb_red = 0.0, inel = 0.0;
    Complex lam_minus;
    for (int s = 0; s < 2; ++s) {
        const Vector& ket = s == 0 ? es.ket_plus : es.ket_minus;
        const Vector& dual = s == 0 ? es.dual_plus : es.dual_minus;
        const Complex omega = s == 0 ? es.omega_plus : es.omega_minus;
        const Complex lam = -I_UNIT * (omega - w2c);
        if (s == 1) lam_minus = lam;
        const Complex amp = ket(0) * (dual.transpose() * rho.col(0))(0);
        sb_blue += amp / (lam - I_UNIT);
        sb_red += amp / (lam + I_UNIT);
        inel += amp * ((2.0 * n_bar + 1.0) * lam - I_UNIT) / (lam * lam + 1.0);
    }

    Transition2Signals t;
    t.gamma_sb = 0.5 * cooling_rates(p).W_total;
    t.weight_blue = 0.25 * c2 * n_bar * std::norm(sb_blue);
    t.weight_red = 0.25 * c2 * (n_bar + 1.0) * std::norm(sb_red);
    const double s = a.saturation;
    t.weight_red_small_s = c2 * (n_bar + 1.0) / 16.0 * (1.0 - s);
    t.weight_blue_small_s = c2 * 4.0 * n_bar / (p.gamma1 * p.gamma1 * s * s) * (1.0 - 4.0 * p.gamma2 / (s * p.gamma1));
    t.pedestal_lambda = lam_minus;
    const Complex g_minus = es.ket_minus(0);
    t.pedestal_weight = -c2 / (2.0 * p.gamma2) * g_minus * g_minus * inel.real();
    t.pedestal_weight_small_s = c2 * 2.0 / (p.gamma1 * p.gamma2) * n_bar / s *
                                (1.0 - 2.0 * p.gamma2 / (s * p.gamma1) - I_UNIT * 0.5 * s);
    t.pedestal_height = t.pedestal_weight.real() / std::abs(lam_minus.real());
    const double g1p = 0.5 * s * p.gamma1;
    t.pedestal_height_telegraph = (a.T_D / a.T_B_small_s) * 2.0 / g1p;

    const SpectralLine blue{-t.gamma_sb + I_UNIT, t.weight_blue, component::sideband_blue, 0, 1};
    const SpectralLine red{-t.gamma_sb - I_UNIT, t.weight_red, component::sideband_red, 0, -1};
    const SpectralLine ped{lam_minus, t.pedestal_weight, component::inelastic_second, 0, 0};
    for (double d : grid) {
        t.blue.push_back(line_shape(blue, d));
        t.red.push_back(line_shape(red, d));
        t.pedestal.push_back(line_shape(ped, d));
    }
    return t;
}

double linear_r2(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 3 || y.size() != n) throw InvalidParams("regression needs at least three points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (syy == 0.0) return 1.0;
    return sxy * sxy / (sxx * syy);
}

namespace {

struct AngleWeights {
    double central_peak = 0.0;
    double transition2_total = 0.0;
    double blue = 0.0, red = 0.0;
};

AngleWeights angle_weights(const SystemParams& p, double n_bar, bool with_transition1) {
    const PerturbationEngine engine(p);
    const auto steady = engine.steady_expansion(n_bar);
    AngleWeights w;
    if (with_transition1) {
        const auto d1 = DipoleOperator::make(p, 1);
        const int decay = static_cast<int>(InternalMode::decay);
        for (const auto& l : second_order_poles(engine, steady, d1, {decay, 0}))
            w.central_peak += l.line.weight.real();
    }
    const auto d2 = DipoleOperator::make(p, 2);
    for (const auto& l : second_order_poles(engine, steady, d2, {})) {
        w.transition2_total += l.line.weight.real();
        if (l.line.component == component::sideband_blue && l.line.ell == 1) w.blue += l.line.weight.real();
        if (l.line.component == component::sideband_red && l.line.ell == -1) w.red += l.line.weight.real();
    }
    return w;
}

}  // namespace

AngleReport angle_dependence_report(const SystemParams& p, double n_bar, int phi_count) {
    if (phi_count < 3) throw InvalidParams("angle scan needs at least three angles");
    AngleReport rep;
    std::vector<double> cos2, cp, t2;
    for (int i = 0; i < phi_count; ++i) {
        SystemParams q = p;
        q.phi2 = 0.5 * std::numbers::pi * i / (phi_count - 1);
        const auto w = angle_weights(q, n_bar, true);
        rep.phi_rows.push_back({q.phi2, w.central_peak, w.transition2_total, w.blue, w.red});
        cos2.push_back(std::cos(q.phi2) * std::cos(q.phi2));
        cp.push_back(w.central_peak);
        t2.push_back(w.transition2_total);
    }
    rep.r2_central_peak = linear_r2(cos2, cp);
    rep.r2_transition2 = linear_r2(cos2, t2);

    for (double psi : {0.0, 0.25 * std::numbers::pi, 0.5 * std::numbers::pi, 0.8 * std::numbers::pi}) {
        SystemParams q = p;
        q.psi = psi;
        const auto w = angle_weights(q, n_bar, false);
        rep.psi_values.push_back(psi);
        rep.psi_blue.push_back(w.blue);
        rep.psi_red.push_back(w.red);
    }
    auto spread = [](const std::vector<double>& v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        const double scale = std::max(std::abs(*lo), std::abs(*hi));
        return scale > 0.0 ? (*hi - *lo) / scale : 0.0;
    };
    rep.psi_variation = std::max(spread(rep.psi_blue), spread(rep.psi_red));
    return rep;
}

}  // namespace qjumps
