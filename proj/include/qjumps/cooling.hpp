#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qjumps/params.hpp"
#include "qjumps/types.hpp"

namespace qjumps {

// Rate-equation description of the motion: heating A± per channel, the
// resulting per-channel equilibrium numbers and the weighted mean.
struct CoolingRates {
    double A1_plus = 0.0, A1_minus = 0.0;
    double A2_plus = 0.0, A2_minus = 0.0;
    double D = 0.0;  // recoil diffusion on transition 1
    double n1 = 0.0, n2 = 0.0;
    double W1 = 0.0, W2 = 0.0;
    double n_bar = 0.0;
    double W_total = 0.0;
    bool channel1_active = false, channel2_active = false;

    double A_plus() const { return A1_plus + A2_plus; }
    double A_minus() const { return A1_minus + A2_minus; }
};

// Laser coupling derivative of transition j on the 3x3 internal space.
Matrix internal_coupling(const SystemParams& p, int j);

// s_j(f) = ∫_0^∞ dτ e^{ifτ} Tr{V_j e^{L_I τ} V_j ρ_st}, via the 9x9 resolvent.
// ResolventPole when if coincides with minus an internal eigenvalue.
Complex fluctuation_spectrum(const SystemParams& p, int j, double freq);

// HeatingRegime when an active channel has W_j <= 0.
CoolingRates cooling_rates(const SystemParams& p);

// Closed forms for resolved-sideband-free Doppler cooling on transition 1 and
// for sideband cooling on transition 2 (with the light-shift width γ₋).
std::pair<double, double> doppler_limit(const SystemParams& p);
std::pair<double, double> sideband_limit(const SystemParams& p);
double ground_state_linewidth(const SystemParams& p);

// Diagonal motional density matrix with mean occupation n_bar.
Matrix thermal_state(double n_bar, int n_fock);

// Stationary distribution of the birth–death rate equation on n_fock levels.
RealVector rate_equation_stationary(const CoolingRates& r, int n_fock);

struct ScanRow {
    double value = 0.0;
    double n1 = 0.0, n2 = 0.0, n_bar = 0.0;
    double W1 = 0.0, W2 = 0.0;
    double n2_sideband_limit = 0.0;
    bool ok = true;
    std::string error;
};

// One row per value of the named parameter; failures are flagged per row.
std::vector<ScanRow> scan_mean_phonon(const SystemParams& p, const std::string& name,
                                      const std::vector<double>& values);

}  // namespace qjumps
