#pragma once

#include <array>
#include <string>
#include <utility>

#include "qjumps/params.hpp"
#include "qjumps/types.hpp"

namespace qjumps {

// Generator of the bare three-level atom at rest (9 x 9, column stacking
// over 3 x 3 operators, index i + 3j for |i><j|).
Matrix internal_liouvillian(const SystemParams& p);

// Electronic-only effective Hamiltonian: H_int - i Σ γ_j/2 |j><j|.
Matrix internal_effective_hamiltonian(const SystemParams& p);

// Complex eigenfrequencies of the driven g-e1 block, branch continuous from
// omega1 = 0 (first -> δ1 - iγ1/2, second -> 0).
std::pair<Complex, Complex> dressed_frequencies(const SystemParams& p);

enum class InternalMode : int {
    steady = 0,
    tls_zero,
    tls_plus,
    tls_minus,
    decay,
    one_plus,
    one_minus,
    two_plus,
    two_minus,
};
inline constexpr int kInternalModes = 9;
std::string to_string(InternalMode m);

// Eigen-element pair with Tr{left * right} = 1.
struct InternalElement {
    InternalMode label;
    Complex lambda;
    Matrix right;  // 3x3
    Matrix left;   // 3x3
};

struct InternalEigensystem {
    Complex omega_plus;
    Complex omega_minus;
    Complex omega_2;
    // Dressed kets (g, e1, e2 components) and their non-conjugated duals.
    Vector ket_plus, ket_minus;
    Vector dual_plus, dual_minus;
    double upsilon = 0.0;
    Complex varsigma;
    std::array<InternalElement, kInternalModes> modes;

    const InternalElement& mode(InternalMode m) const { return modes[static_cast<int>(m)]; }
    // Columns: vec(right_k); rows: vec(left_kᵀ)ᵀ, so rows * columns = identity.
    Matrix right_matrix() const;
    Matrix dual_matrix() const;
};

// Five pairs from closed forms, the two-level triple from a 4 x 4 eigensolve.
// DegenerateInternal if two eigenvalues coincide within 1e-8.
InternalEigensystem internal_eigensystem(const SystemParams& p);

struct InternalSteadyState {
    Matrix rho;    // 3x3
    double norm;   // γ1² + 4δ1² + 2Ω1²
};
InternalSteadyState internal_steady_state(const SystemParams& p);

// s = (Ω1²/2)/(δ1² + γ1²/4)
double saturation(const SystemParams& p);

}  // namespace qjumps
