#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qjumps/hilbert.hpp"
#include "qjumps/params.hpp"
#include "qjumps/spectrum_result.hpp"

namespace qjumps {

// Emission operator of transition j seen under detector angle ψ:
// |g><j| exp(-i η_j cos ψ X) and its first three Taylor coefficients in X.
struct DipoleOperator {
    int transition = 1;
    double psi = 0.0;
    double eta_projected = 0.0;  // η_j cos ψ
    QOperator full;
    std::array<QOperator, 3> orders;  // D0, D1, D2

    static DipoleOperator make(const SystemParams& p, int transition);
};

// Bare atom at rest. The λ = 0 pole is the elastic weight; everything else is
// inelastic_zero. Identically zero for transition 2.
SpectrumResult zero_order_spectrum(const SystemParams& p, int transition, const std::vector<double>& grid);

// Ten terms Tr{D_a† P_b D_c ϱ_d} with a+b+c+d = 2, in the order of
// second_order_terms().
using SecondOrderTerms = std::array<Complex, 10>;
struct TermIndex {
    int dipole_left, projector, dipole_right, state;
};
const std::array<TermIndex, 10>& second_order_terms();

struct SecondOrderLine {
    SpectralLine line;
    SecondOrderTerms terms{};
};

// S0 + S2 with every pole classified by its zero-order labels: stationary
// internal mode with ℓ = 0 is elastic (λ = 0) or elastic_correction, ℓ = ±1, ±2
// are the sidebands (blue above the laser), other internal modes are
// inelastic_second. The motional state is the perturbative stationary one
// unless a thermal occupation is forced.
struct SecondOrderSpectrum {
    SpectrumResult result;
    std::vector<SecondOrderLine> poles;  // second-order poles with the term breakdown
    double n_bar = 0.0;                  // occupation of the motional state used
};
SecondOrderSpectrum second_order_spectrum(const SystemParams& p, int transition, std::optional<double> n_bar,
                                          const std::vector<double>& grid);

// Narrow Lorentzian of transition 1 at λ = -γ2 from the telegraph switching.
struct CentralPeak {
    double hwhm = 0.0;
    double weight = 0.0;          // closed form with the dressed-state sum
    double weight_small_s = 0.0;  // first order in the saturation parameter
    double height_telegraph = 0.0;  // (T_D/T_B)(s/2)/γ2 with the small-s T_B
    std::vector<double> curve;
    std::vector<double> curve_small_s;
};
CentralPeak central_peak_transition1(const SystemParams& p, double n_bar, const std::vector<double>& grid);

// Closed-form transition-2 signals: sidebands of width W/2 and the pedestal at
// the λ_{1-} pole.
struct Transition2Signals {
    double gamma_sb = 0.0;
    double weight_blue = 0.0, weight_red = 0.0;
    double weight_blue_small_s = 0.0, weight_red_small_s = 0.0;
    Complex pedestal_lambda;
    Complex pedestal_weight;
    Complex pedestal_weight_small_s;
    double pedestal_height = 0.0;            // Re F / |Re λ|
    double pedestal_height_telegraph = 0.0;  // (T_D/T_B)(2/γ1') with the small-s T_B
    std::vector<double> blue, red, pedestal;
};
// InfiniteBright when cos φ2 = 0.
Transition2Signals transition2_signals(const SystemParams& p, double n_bar, const std::vector<double>& grid);

struct AngleRow {
    double phi2 = 0.0;
    double central_peak = 0.0;       // numerical weight at λ = -γ2, transition 1
    double transition2_total = 0.0;  // all second-order weight of transition 2
    double blue = 0.0, red = 0.0;    // transition-2 sideband weights
};
struct AngleReport {
    std::vector<AngleRow> phi_rows;
    double r2_central_peak = 0.0;  // linear regression against cos²φ2
    double r2_transition2 = 0.0;
    std::vector<double> psi_values;
    std::vector<double> psi_blue, psi_red;
    double psi_variation = 0.0;  // max relative spread of the sideband weights over ψ
};
AngleReport angle_dependence_report(const SystemParams& p, double n_bar, int phi_count = 10);

// R² of the least-squares line y = a + b x.
double linear_r2(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qjumps
