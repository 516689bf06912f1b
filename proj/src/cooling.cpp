#include "qjumps/cooling.hpp"

#include <cmath>

#include "qjumps/errors.hpp"
#include "qjumps/hilbert.hpp"
#include "qjumps/internal.hpp"
#include "qjumps/lamb_dicke.hpp"
#include "qjumps/linalg.hpp"
#include "qjumps/parallel.hpp"

namespace qjumps {

Matrix internal_coupling(const SystemParams& p, int j) {
    if (j != 1 && j != 2) throw InvalidParams("transition index must be 1 or 2");
    Matrix v = Matrix::Zero(3, 3);
    if (j == 1) {
        const Complex c = 0.5 * p.omega1 * I_UNIT * p.eta1 * std::cos(p.phi1);
        v(1, 0) = c;
        v(0, 1) = -c;
    } else {
        v(2, 0) = v(0, 2) = 0.5 * p.omega2 * p.eta2 * std::cos(p.phi2);
    }
    return v;
}

Complex fluctuation_spectrum(const SystemParams& p, int j, double freq) {
    p.validate();
    const Matrix v = internal_coupling(p, j);
    // Dense eigenvalues so that a stable metastable level (γ2 = 0) still works.
    const Matrix li = internal_liouvillian(p);
    const Vector lambdas = Eigen::ComplexEigenSolver<Matrix>(li, false).eigenvalues();
    for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
        const Complex z = lambdas(k) + I_UNIT * freq;
        if (std::abs(z.real()) < 1e-8 && std::abs(z.imag()) < 1e-8)
            throw ResolventPole("frequency " + std::to_string(freq) + " hits an internal eigenvalue");
    }
    const Matrix rho = internal_steady_state(p).rho;
    const Matrix shifted = li + I_UNIT * freq * Matrix::Identity(9, 9);
    const Vector y = -shifted.partialPivLu().solve(linalg::vec(v * rho));
    return (v * linalg::unvec(y, 3)).trace();
}

CoolingRates cooling_rates(const SystemParams& p) {
    p.validate();
    CoolingRates r;
    const double rho11 = internal_steady_state(p).rho(1, 1).real();
    r.D = p.eta1 * p.eta1 * kPatternSecondMoment * 0.5 * p.gamma1 * rho11;
    r.A1_plus = 2.0 * (fluctuation_spectrum(p, 1, -1.0).real() + r.D);
    r.A1_minus = 2.0 * (fluctuation_spectrum(p, 1, 1.0).real() + r.D);
    r.A2_plus = 2.0 * fluctuation_spectrum(p, 2, -1.0).real();
    r.A2_minus = 2.0 * fluctuation_spectrum(p, 2, 1.0).real();
    r.W1 = r.A1_minus - r.A1_plus;
    r.W2 = r.A2_minus - r.A2_plus;
    r.channel1_active = r.A1_plus != 0.0 || r.A1_minus != 0.0;
    r.channel2_active = r.A2_plus != 0.0 || r.A2_minus != 0.0;
    if (r.channel1_active && !(r.W1 > 0.0))
        throw HeatingRegime("transition 1 heats (W1 = " + std::to_string(r.W1) + ")");
    if (r.channel2_active && !(r.W2 > 0.0))
        throw HeatingRegime("transition 2 heats (W2 = " + std::to_string(r.W2) + ")");
    if (!r.channel1_active && !r.channel2_active) throw HeatingRegime("no active cooling channel");
    r.W_total = 0.0;
    double weighted = 0.0;
    if (r.channel1_active) {
        r.n1 = r.A1_plus / r.W1;
        r.W_total += r.W1;
        weighted += r.n1 * r.W1;
    }
    if (r.channel2_active) {
        r.n2 = r.A2_plus / r.W2;
        r.W_total += r.W2;
        weighted += r.n2 * r.W2;
    }
    r.n_bar = weighted / r.W_total;
    return r;
}

std::pair<double, double> doppler_limit(const SystemParams& p) {
    const double c2 = std::pow(std::cos(p.phi1), 2);
    const double n1 = 0.25 * p.gamma1 * (1.0 + kPatternSecondMoment / c2) - 0.5;
    const double w1 = 2.0 * p.eta1 * p.eta1 * p.omega1 * p.omega1 * c2 / (p.gamma1 * p.gamma1);
    return {n1, w1};
}

double ground_state_linewidth(const SystemParams& p) { return p.omega1 * p.omega1 / (2.0 * p.gamma1); }

std::pair<double, double> sideband_limit(const SystemParams& p) {
    const double width = p.gamma2 + ground_state_linewidth(p);
    const double n2 = width * width / 16.0;
    const double w2 = std::pow(p.eta2 * p.omega2 * std::cos(p.phi2), 2) / width;
    return {n2, w2};
}

Matrix thermal_state(double n_bar, int n_fock) {
    return thermal_populations(n_bar, n_fock).cast<Complex>().asDiagonal();
}

RealVector rate_equation_stationary(const CoolingRates& r, int n_fock) {
    RealVector p(n_fock);
    const double ratio = r.A_plus() / r.A_minus();
    p(0) = 1.0;
    for (int n = 1; n < n_fock; ++n) p(n) = p(n - 1) * ratio;
    return p / p.sum();
}

std::vector<ScanRow> scan_mean_phonon(const SystemParams& p, const std::string& name,
                                      const std::vector<double>& values) {
    (void)p.get(name);  // unknown names fail before any work
    std::vector<ScanRow> rows(values.size());
    parallel_for(values.size(), [&](std::size_t i) {
        ScanRow& row = rows[i];
        row.value = values[i];
        SystemParams q = p;
        q.set(name, values[i]);
        row.n2_sideband_limit = sideband_limit(q).first;
        try {
            const auto r = cooling_rates(q);
            row.n1 = r.n1;
            row.n2 = r.n2;
            row.n_bar = r.n_bar;
            row.W1 = r.W1;
            row.W2 = r.W2;
        } catch (const ComputeError& e) {
            row.ok = false;
            row.error = e.kind() + ": " + e.what();
        }
    });
    return rows;
}

}  // namespace qjumps
