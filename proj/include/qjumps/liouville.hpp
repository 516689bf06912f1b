#pragma once

#include <vector>

#include "qjumps/hilbert.hpp"
#include "qjumps/params.hpp"
#include "qjumps/spectrum_result.hpp"
#include "qjumps/types.hpp"

namespace qjumps {

inline constexpr int kDefaultQuadratureOrder = 8;

// Normalized dipole emission pattern w(u) = 3(1+u²)/8 on u ∈ [-1, 1].
double dipole_pattern(double u);

// Linear map on column-stacked d x d operators.
class SuperOperator {
public:
    SuperOperator(SpaceDims dims, Matrix data);

    static SuperOperator zero(SpaceDims dims);
    // X -> A X, X -> X B, X -> -i[H, X]
    static SuperOperator left(const QOperator& a);
    static SuperOperator right(const QOperator& b);
    static SuperOperator commutator(const QOperator& h);
    // X -> A X A†
    static SuperOperator sandwich(const QOperator& a);

    const SpaceDims& dims() const { return dims_; }
    const Matrix& data() const { return data_; }
    Matrix& data() { return data_; }

    QOperator apply(const QOperator& x) const;

    SuperOperator& operator+=(const SuperOperator& o);
    friend SuperOperator operator+(SuperOperator a, const SuperOperator& b) { return a += b; }
    friend SuperOperator operator-(SuperOperator a, const SuperOperator& b);
    friend SuperOperator operator*(Complex c, SuperOperator a);

private:
    SpaceDims dims_;
    Matrix data_;
};

QOperator build_hamiltonian(const SystemParams& p);
SuperOperator build_dissipator(const SystemParams& p, int quad_order = kDefaultQuadratureOrder);
SuperOperator build_liouvillian(const SystemParams& p, int quad_order = kDefaultQuadratureOrder);

// Unique trace-one null vector of L; NonUniqueSteadyState when the null space
// is not one-dimensional.
QOperator steady_state(const SuperOperator& L);

// Biorthonormal eigen-elements of a Liouvillian. The pairing is
// Tr{left_i right_j} = δ_ij, so the left element at λ = 0 is the identity.
class SpectralDecomposition {
public:
    explicit SpectralDecomposition(SpaceDims dims) : dims_(dims) {}

    std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
    const Vector& eigenvalues() const { return values_; }
    QOperator right(std::size_t i) const;
    QOperator left(std::size_t i) const;
    // Tr{left_i X} for every i.
    Vector coefficients(const QOperator& x) const;
    QOperator reconstruct(const Vector& coefficients) const;
    // e^{L t} X
    QOperator propagate(const QOperator& x, double t) const;
    // Index of the eigenvalue of smallest modulus.
    std::size_t stationary_index() const;
    double worst_pair_condition() const { return worst_condition_; }

private:
    friend SpectralDecomposition spectral_decomposition(const SuperOperator& L);
    SpaceDims dims_;
    Vector values_;
    Matrix right_;
    Matrix dual_;
    double worst_condition_ = 0.0;
};

// NearDefective when a pair has 1/(|left||right|) below 1e-8.
SpectralDecomposition spectral_decomposition(const SuperOperator& L);

// S(Δω) = Re Σ_λ F(λ)/(iΔω - λ) with F(λ) = Tr{D† ρ̂_λ} Tr{ρ̌_λ D ρ_st}. The
// λ = 0 term is reported as elastic_weight and left out of the curve.
SpectrumResult correlation_spectrum(const SpectralDecomposition& decomposition, const QOperator& dipole,
                                    const QOperator& rho_st, const std::vector<double>& grid);

}  // namespace qjumps
