#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qjumps/hilbert.hpp"
#include "qjumps/params.hpp"
#include "qjumps/types.hpp"

namespace qjumps {

// H - i Σ γ_j/2 |j><j| with its right eigenvectors and dual rows.
class EffectiveHamiltonian {
public:
    explicit EffectiveHamiltonian(const SystemParams& p);

    const QOperator& op() const { return op_; }
    const Vector& frequencies() const { return frequencies_; }  // Im <= 0
    const Matrix& right() const { return right_; }
    const Matrix& dual() const { return dual_; }
    const Matrix& gram() const { return gram_; }  // R† R

    // e^{-i H_eff t} ψ
    Vector evolve(const Vector& psi, double t) const;
    // ‖e^{-i H_eff t} ψ‖² from eigen-coefficients c = dual ψ.
    double norm2(const Vector& coefficients, double t) const;

private:
    QOperator op_;
    Vector frequencies_;
    Matrix right_;
    Matrix dual_;
    Matrix gram_;
};

// Survival probability of the no-emission evolution after a detection.
struct WaitingTimeResult {
    std::vector<double> times;
    std::vector<double> P;
    double n_bar = 0.0;  // occupation of the motional state after the detection
};

// Grid {0} ∪ logspace(t_min, t_max, count).
std::vector<double> waiting_time_grid(double t_min, double t_max, int count);

// P(t) = Tr{e^{-iH_eff t} |g><g| ⊗ μ e^{iH_eff† t}}. The motional state μ is
// thermal with the rate-equation occupation unless one is given.
WaitingTimeResult waiting_time(const SystemParams& p, const std::vector<double>& grid,
                               std::optional<double> n_bar = std::nullopt);

// A e^{-t/t_fast} + B e^{-t/t_slow}
struct BiexponentialFit {
    double A = 0.0, t_fast = 0.0, B = 0.0, t_slow = 0.0;
    double operator()(double t) const;
};

struct SplitTime {
    BiexponentialFit fit;
    double tau = 0.0;            // where the two fitted components are equal
    double tau_geometric = 0.0;  // √(t_fast t_slow), diagnostic
};

// Log-space least-squares fit; NoTimescaleSeparation when t_slow/t_fast < 10
// or one component carries no weight.
BiexponentialFit fit_biexponential(const WaitingTimeResult& w);
SplitTime split_time(const WaitingTimeResult& w);

// T_B = [1-P(τ)]⁻¹ {τ + P(τ)⁻¹ ∫_0^τ P},  T_D = τ + P(τ)⁻¹ ∫_τ^∞ P.
// Integrals are exact for piecewise exponential P between grid points; the
// tail beyond the last point is closed with the slow time.
std::pair<double, double> bright_dark_periods(const WaitingTimeResult& w, double tau, double slow_time);

// Log-linear interpolation of P.
double interpolate_survival(const WaitingTimeResult& w, double t);

struct AnalyticScales {
    double T_B = 0.0;               // from the exact Γ sum
    double T_D = 0.0;               // 1/γ2
    double Gamma2 = 0.0;            // Γ² from the sum over dressed states
    double Gamma2_small_s = 0.0;    // small-saturation expansion
    double Gamma2_leading = 0.0;    // γ1'²/(4 n̄)
    double T0 = 0.0;                // (γ1 ρ11)⁻¹
    double T_B_small_s = 0.0;       // (η2² cos²φ2 n̄ Ω2² / γ1')⁻¹
    double slow_weight = 0.0;       // probability of entering a dark period per detection
    double saturation = 0.0;
};

// InfiniteBright when the metastable level is not coupled (cos φ2 = 0).
AnalyticScales analytic_scales(const SystemParams& p, double n_bar);

// Fast part from the dressed g-e1 decay plus the slow tail weighted by the
// first-order motional admixture of |2>.
std::vector<double> perturbative_waiting_time(const SystemParams& p, double n_bar, const std::vector<double>& grid);

// max |ln P_other - ln P| / |ln P| over grid points 0 < t <= t_max.
double max_log_deviation(const WaitingTimeResult& w, const std::vector<double>& other, double t_max);

struct EmissionEvent {
    double time = 0.0;
    int transition = 1;
    double u = 0.0;  // cosine of the emission angle relative to the trap axis
};

struct Period {
    double start = 0.0;
    double end = 0.0;
    bool bright = true;
    bool censored = false;  // runs into the end of the record
};

struct TrajectoryRecord {
    double duration = 0.0;
    double dark_threshold = 0.0;
    std::vector<EmissionEvent> events;
    std::vector<Period> periods;

    // Gaps between successive emissions on any transition.
    std::vector<double> inter_click_gaps() const;
    std::vector<double> durations(bool bright) const;  // uncensored only
};

// Inverse CDF of the dipole pattern: solves u³ + 3u + 4 - 8r = 0.
double sample_emission_direction(double r);

// Quantum-jump unravelling. Dark periods are gaps between transition-1
// emissions longer than dark_threshold.
TrajectoryRecord simulate_trajectory(const SystemParams& p, double duration, std::uint64_t seed,
                                     double dark_threshold);

// sup_t |S_empirical(t) - P(t)| over the gap sample.
double ks_distance(std::vector<double> gaps, const WaitingTimeResult& w);

}  // namespace qjumps
