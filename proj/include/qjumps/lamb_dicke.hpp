#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "qjumps/hilbert.hpp"
#include "qjumps/internal.hpp"
#include "qjumps/liouville.hpp"
#include "qjumps/params.hpp"

namespace qjumps {

// ∫ w(u) u² du for the dipole pattern.
inline constexpr double kPatternSecondMoment = 0.4;

// Expansion of the generator in powers of X = a + a†:
//   H ≈ H0 + V1 ⊗ X + (V2 ⊗ X²)/2,  K ≈ K0 + K2.
struct LDExpansion {
    SystemParams params;
    Matrix L0_internal;  // 9x9
    Matrix V1;           // 3x3, first derivative of the laser coupling
    Matrix V2;           // 3x3, second derivative; only the running wave contributes
    // K2 ρ = Σ_j diffusion[j] A_j (2XρX - X²ρ - ρX²) A_j†, A_j = |g><j|
    std::array<double, 2> diffusion{};
};

LDExpansion expand(const SystemParams& p);

// Superoperator pieces on the composite space.
SuperOperator zero_order_generator(const LDExpansion& e);
SuperOperator first_order_generator(const LDExpansion& e);
SuperOperator second_order_generator(const LDExpansion& e);
SuperOperator recoil_diffusion(const LDExpansion& e);

// Cheaper direct action on operators.
QOperator apply_first_order(const LDExpansion& e, const QOperator& x);
QOperator apply_second_order(const LDExpansion& e, const QOperator& x);

// Zero-order eigenbasis: X = Σ_k Σ_{n,m} c_k(n,m) right_k ⊗ |n><m|, with
// eigenvalue λ_k + i(m - n). A cluster collects the coefficients of one
// internal mode k at fixed ℓ = m - n.
struct Cluster {
    int k = 0;
    int ell = 0;
    bool operator==(const Cluster&) const = default;
};

using Coefficients = std::array<Matrix, kInternalModes>;

class ZeroOrderFrame {
public:
    explicit ZeroOrderFrame(const SystemParams& p);

    int n_fock() const { return n_fock_; }
    const InternalEigensystem& internal() const { return internal_; }
    int stationary_mode() const { return static_cast<int>(InternalMode::steady); }
    Complex internal_eigenvalue(int k) const { return internal_.modes[k].lambda; }
    Complex eigenvalue(const Cluster& c) const { return internal_eigenvalue(c.k) + I_UNIT * double(c.ell); }

    Coefficients coefficients(const QOperator& x) const;
    QOperator assemble(const Coefficients& c) const;
    // Fock row indices n of a cluster (pairs (n, n+ℓ) inside the truncation).
    std::vector<int> rows(int ell) const;

private:
    int n_fock_;
    InternalEigensystem internal_;
    Matrix right_;
    Matrix dual_;
};

// Zero-order projector onto one cluster; idempotent.
QOperator project_zero_order(const ZeroOrderFrame& frame, const Cluster& c, const QOperator& x);

struct FirstOrderCheck {
    bool vanishes = true;
    double max_norm = 0.0;
    // Distinct clusters whose zero-order eigenvalues coincide within 1e-6 and
    // are coupled by the first-order generator.
    std::vector<std::pair<Cluster, Cluster>> resonances;
};

// Checks ‖P0 L1 P0‖ < 1e-9 on every degenerate zero-order subspace.
FirstOrderCheck first_order_vanishing_check(const SystemParams& p);

// Second-order Rayleigh–Schrödinger machinery around the zero-order clusters.
class PerturbationEngine {
public:
    explicit PerturbationEngine(const SystemParams& p);

    const LDExpansion& expansion() const { return expansion_; }
    const ZeroOrderFrame& frame() const { return frame_; }
    const SystemParams& params() const { return expansion_.params; }

    QOperator L1(const QOperator& x) const { return apply_first_order(expansion_, x); }
    QOperator L2(const QOperator& x) const { return apply_second_order(expansion_, x); }
    // Reduced resolvent Σ_{outside c} P/(λ_c - λ); zero on the cluster itself.
    QOperator resolvent(const Cluster& c, const QOperator& x) const;
    QOperator project(const Cluster& c, const QOperator& x) const { return project_zero_order(frame_, c, x); }

    // P0 (L2 + L1 S L1) P0 restricted to the cluster, in the basis of its rows.
    Matrix effective_generator(const Cluster& c) const;

    // Eigen-decomposition of the effective generator of an undamped cluster.
    struct FineModes {
        Cluster cluster;
        std::vector<int> rows;
        Vector shifts;  // second-order eigenvalue shifts μ_i
        Matrix right;   // columns
        Matrix dual;    // rows
    };
    FineModes fine_modes(const Cluster& c) const;
    // Projector onto fine mode i of a cluster.
    QOperator project_mode(const FineModes& modes, int i, const QOperator& x) const;

    // Stationary state through second order: ϱ0 = ρ_st ⊗ μ, ϱ1, ϱ2 with
    // intermediate normalization (no ϱ2 component on the stationary cluster).
    // μ is the null vector of the ℓ = 0 effective generator unless a thermal
    // occupation is forced.
    struct SteadyExpansion {
        RealVector motional;  // populations μ_n
        QOperator order0, order1, order2;
    };
    SteadyExpansion steady_expansion(std::optional<double> forced_n_bar = std::nullopt) const;

private:
    LDExpansion expansion_;
    ZeroOrderFrame frame_;
};

}  // namespace qjumps
