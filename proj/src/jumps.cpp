#include "qjumps/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "qjumps/cooling.hpp"
#include "qjumps/errors.hpp"
#include "qjumps/internal.hpp"
#include "qjumps/linalg.hpp"
#include "qjumps/liouville.hpp"
#include "qjumps/parallel.hpp"

namespace qjumps {

EffectiveHamiltonian::EffectiveHamiltonian(const SystemParams& p) : op_(build_hamiltonian(p)) {
    const SpaceDims dims{p.n_fock};
    op_ -= (0.5 * I_UNIT * p.gamma1) * atomic(dims, Level::e1, Level::e1);
    op_ -= (0.5 * I_UNIT * p.gamma2) * atomic(dims, Level::e2, Level::e2);
    auto pairs = linalg::eig_general(op_.data());
    frequencies_ = std::move(pairs.values);
    right_ = std::move(pairs.right);
    dual_ = std::move(pairs.dual);
    gram_ = right_.adjoint() * right_;
}

Vector EffectiveHamiltonian::evolve(const Vector& psi, double t) const {
    Vector c = dual_ * psi;
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(-I_UNIT * frequencies_(i) * t);
    return right_ * c;
}

double EffectiveHamiltonian::norm2(const Vector& coefficients, double t) const {
    Vector v = coefficients;
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) *= std::exp(-I_UNIT * frequencies_(i) * t);
    return v.dot(gram_ * v).real();
}

std::vector<double> waiting_time_grid(double t_min, double t_max, int count) {
    if (!(t_min > 0.0) || !(t_max > t_min) || count < 2) throw InvalidParams("invalid waiting-time grid");
    std::vector<double> g{0.0};
    const double a = std::log(t_min), b = std::log(t_max);
    for (int i = 0; i < count; ++i) g.push_back(std::exp(a + (b - a) * i / (count - 1)));
    return g;
}

WaitingTimeResult waiting_time(const SystemParams& p, const std::vector<double>& grid, std::optional<double> n_bar) {
    p.validate();
    WaitingTimeResult out;
    out.n_bar = n_bar ? *n_bar : cooling_rates(p).n_bar;
    out.times = grid;
    out.P.resize(grid.size());

    const EffectiveHamiltonian heff(p);
    Matrix ground = Matrix::Zero(3, 3);
    ground(0, 0) = 1.0;
    const Matrix rho = linalg::kron(ground, thermal_state(out.n_bar, p.n_fock));
    const Matrix m = heff.dual() * rho * heff.dual().adjoint();
    // P(t) = e† (G ∘ Mᵀ) e with e_i = exp(-i ω_i t)
    const Matrix kernel = heff.gram().cwiseProduct(m.transpose());
    const Vector& w = heff.frequencies();
    parallel_for(grid.size(), [&](std::size_t g) {
        Vector e(w.size());
        for (Eigen::Index i = 0; i < w.size(); ++i) e(i) = std::exp(-I_UNIT * w(i) * grid[g]);
        out.P[g] = e.dot(kernel * e).real();
    });
    return out;
}

double BiexponentialFit::operator()(double t) const { return A * std::exp(-t / t_fast) + B * std::exp(-t / t_slow); }

namespace {

// Residuals ln(model) - ln(P) with x = (ln A, ln t_f, ln B, ln t_s).
struct LogBiexponential : Eigen::DenseFunctor<double> {
    const std::vector<double>& t;
    const std::vector<double>& logp;

    LogBiexponential(const std::vector<double>& times, const std::vector<double>& lp)
        : Eigen::DenseFunctor<double>(4, static_cast<int>(times.size())), t(times), logp(lp) {}

    static void parts(const InputType& x, double t, double& la, double& lb) {
        la = x(0) - t * std::exp(-x(1));
        lb = x(2) - t * std::exp(-x(3));
    }

    int operator()(const InputType& x, ValueType& f) const {
        for (std::size_t i = 0; i < t.size(); ++i) {
            double la, lb;
            parts(x, t[i], la, lb);
            const double mx = std::max(la, lb);
            f(i) = mx + std::log(std::exp(la - mx) + std::exp(lb - mx)) - logp[i];
        }
        return 0;
    }

    int df(const InputType& x, JacobianType& jac) const {
        for (std::size_t i = 0; i < t.size(); ++i) {
            double la, lb;
            parts(x, t[i], la, lb);
            const double mx = std::max(la, lb);
            const double ea = std::exp(la - mx), eb = std::exp(lb - mx);
            const double wa = ea / (ea + eb), wb = eb / (ea + eb);
            jac(i, 0) = wa;
            jac(i, 1) = wa * t[i] * std::exp(-x(1));
            jac(i, 2) = wb;
            jac(i, 3) = wb * t[i] * std::exp(-x(3));
        }
        return 0;
    }
};

}  // namespace

BiexponentialFit fit_biexponential(const WaitingTimeResult& w) {
    std::vector<double> t, lp;
    for (std::size_t i = 0; i < w.times.size(); ++i)
        if (w.times[i] > 0.0 && w.P[i] > 1e-280) {
            t.push_back(w.times[i]);
            lp.push_back(std::log(w.P[i]));
        }
    if (t.size() < 8) throw NoTimescaleSeparation("too few positive samples of P(t) to fit");

    // Initial guess: straight line through the last third for the slow part,
    // then the 1/e time of the remainder for the fast part.
    const std::size_t start = 2 * t.size() / 3;
    double st = 0, sl = 0, stt = 0, stl = 0;
    const double cnt = static_cast<double>(t.size() - start);
    for (std::size_t i = start; i < t.size(); ++i) {
        st += t[i];
        sl += lp[i];
        stt += t[i] * t[i];
        stl += t[i] * lp[i];
    }
    const double slope = (cnt * stl - st * sl) / (cnt * stt - st * st);
    double t_slow0 = slope < 0.0 ? -1.0 / slope : t.back();
    double b0 = std::min(std::exp((sl - slope * st) / cnt), 0.5);
    const double a0 = std::max(1.0 - b0, 1e-3);
    double t_fast0 = t_slow0 / 100.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (std::exp(lp[i]) - b0 * std::exp(-t[i] / t_slow0) < a0 / std::exp(1.0)) {
            t_fast0 = std::max(t[i], 1e-12);
            break;
        }

    LogBiexponential functor(t, lp);
    Eigen::VectorXd x(4);
    x << std::log(a0), std::log(t_fast0), std::log(b0), std::log(t_slow0);
    Eigen::LevenbergMarquardt<LogBiexponential> lm(functor);
    lm.setMaxfev(4000);
    lm.minimize(x);
    if (!x.allFinite()) throw NoTimescaleSeparation("biexponential fit diverged");

    BiexponentialFit fit{std::exp(x(0)), std::exp(x(1)), std::exp(x(2)), std::exp(x(3))};
    if (fit.t_fast > fit.t_slow) {
        std::swap(fit.A, fit.B);
        std::swap(fit.t_fast, fit.t_slow);
    }
    return fit;
}

SplitTime split_time(const WaitingTimeResult& w) {
    SplitTime s;
    s.fit = fit_biexponential(w);
    const auto& f = s.fit;
    const double total = f.A + f.B;
    if (!(f.t_slow / f.t_fast >= 10.0) || f.A < 1e-6 * total || f.B < 1e-6 * total)
        throw NoTimescaleSeparation("no separated time scales: t_fast = " + std::to_string(f.t_fast) +
                                    ", t_slow = " + std::to_string(f.t_slow) + ", weights " +
                                    std::to_string(f.A) + " / " + std::to_string(f.B));
    s.tau_geometric = std::sqrt(f.t_fast * f.t_slow);
    s.tau = std::log(f.A / f.B) / (1.0 / f.t_fast - 1.0 / f.t_slow);
    if (!(s.tau > f.t_fast && s.tau < f.t_slow))
        throw NoTimescaleSeparation("fitted components do not cross between the two time scales");
    return s;
}

namespace {

// ∫ of the log-linear interpolant between two samples.
double segment_integral(double t0, double p0, double t1, double p1) {
    if (p0 <= 0.0 || p1 <= 0.0) return 0.5 * (t1 - t0) * (p0 + p1);
    const double r = std::log(p1 / p0);
    if (std::abs(r) < 1e-10) return 0.5 * (t1 - t0) * (p0 + p1);
    return (t1 - t0) * (p1 - p0) / r;
}

}  // namespace

double interpolate_survival(const WaitingTimeResult& w, double t) {
    const auto& ts = w.times;
    if (t <= ts.front()) return w.P.front();
    if (t >= ts.back()) return w.P.back();
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - ts.begin());
    const double t0 = ts[i - 1], t1 = ts[i], p0 = w.P[i - 1], p1 = w.P[i];
    const double f = (t - t0) / (t1 - t0);
    if (p0 > 0.0 && p1 > 0.0) return p0 * std::pow(p1 / p0, f);
    return p0 + f * (p1 - p0);
}

std::pair<double, double> bright_dark_periods(const WaitingTimeResult& w, double tau, double slow_time) {
    const auto& ts = w.times;
    if (ts.size() < 2 || tau <= ts.front() || tau >= ts.back())
        throw InvalidParams("split time outside the sampled range");
    const double p_tau = interpolate_survival(w, tau);
    double head = 0.0, tail = 0.0;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const double t0 = ts[i - 1], t1 = ts[i];
        if (t1 <= tau) {
            head += segment_integral(t0, w.P[i - 1], t1, w.P[i]);
        } else if (t0 >= tau) {
            tail += segment_integral(t0, w.P[i - 1], t1, w.P[i]);
        } else {
            head += segment_integral(t0, w.P[i - 1], tau, p_tau);
            tail += segment_integral(tau, p_tau, t1, w.P[i]);
        }
    }
    tail += w.P.back() * slow_time;
    const double t_bright = (tau + head / p_tau) / (1.0 - p_tau);
    const double t_dark = tau + tail / p_tau;
    return {t_bright, t_dark};
}

AnalyticScales analytic_scales(const SystemParams& p, double n_bar) {
    p.validate();
    const double coupling = p.eta2 * std::cos(p.phi2) * p.omega2;
    if (std::abs(std::cos(p.phi2)) < 1e-12 || coupling == 0.0)
        throw InfiniteBright("metastable level is not coupled to the motion (eta2 cos(phi2) Omega2 = 0); T_B is infinite");
    const auto es = internal_eigensystem(p);
    AnalyticScales a;
    a.saturation = saturation(p);
    const double rho11 = internal_steady_state(p).rho(1, 1).real();
    a.T0 = 1.0 / (p.gamma1 * rho11);
    a.T_D = 1.0 / p.gamma2;

    double inv_gamma2 = 0.0;
    for (int ell : {1, -1}) {
        Complex amp = 0.0;
        amp += es.ket_plus(0) * es.dual_plus(0) / (es.omega_2 - es.omega_plus + double(ell));
        amp += es.ket_minus(0) * es.dual_minus(0) / (es.omega_2 - es.omega_minus + double(ell));
        inv_gamma2 += (n_bar + (ell == 1 ? 1.0 : 0.0)) * std::norm(amp);
    }
    a.Gamma2 = 1.0 / inv_gamma2;
    a.T_B = 4.0 * a.Gamma2 * a.T0 / (coupling * coupling);
    a.slow_weight = 0.25 * coupling * coupling * inv_gamma2;

    const double s = a.saturation;
    const double g1p = 0.5 * s * p.gamma1;
    a.Gamma2_small_s =
        1.0 / (16.0 * n_bar / (p.gamma1 * p.gamma1 * s * s) * (1.0 + s + 4.0 * p.gamma2 / (s * p.gamma1)));
    a.Gamma2_leading = g1p * g1p / (4.0 * n_bar);
    a.T_B_small_s = g1p / (coupling * coupling * n_bar);
    return a;
}

std::vector<double> perturbative_waiting_time(const SystemParams& p, double n_bar, const std::vector<double>& grid) {
    const auto es = internal_eigensystem(p);
    double weight = 0.0;
    try {
        weight = analytic_scales(p, n_bar).slow_weight;
    } catch (const InfiniteBright&) {
        weight = 0.0;
    }
    const Complex omega[2] = {es.omega_plus, es.omega_minus};
    const Vector* ket[2] = {&es.ket_plus, &es.ket_minus};
    const Vector* dual[2] = {&es.dual_plus, &es.dual_minus};
    std::vector<double> out(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double t = grid[g];
        Complex fast = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const Complex overlap = ket[b]->dot(*ket[a]);  // <b|a>
                fast += std::exp(-I_UNIT * (omega[a] - std::conj(omega[b])) * t) * overlap * (*dual[a])(0) *
                        std::conj((*dual[b])(0));
            }
        out[g] = (1.0 - weight) * fast.real() + weight * std::exp(-p.gamma2 * t);
    }
    return out;
}

double max_log_deviation(const WaitingTimeResult& w, const std::vector<double>& other, double t_max) {
    if (other.size() != w.P.size()) throw InvalidParams("curves are sampled on different grids");
    double dev = 0.0;
    for (std::size_t i = 0; i < w.times.size(); ++i) {
        const double t = w.times[i];
        if (t <= 0.0 || t > t_max) continue;
        if (!(w.P[i] > 0.0 && other[i] > 0.0)) return std::numeric_limits<double>::infinity();
        const double ref = std::log(w.P[i]);
        const double diff = std::abs(std::log(other[i]) - ref);
        if (diff == 0.0) continue;
        dev = std::max(dev, diff / std::abs(ref));
    }
    return dev;
}

}  // namespace qjumps
