#pragma once

#include "qjumps/types.hpp"

namespace qjumps {

enum class Level : int { g = 0, e1 = 1, e2 = 2 };

// Three electronic levels tensored with a truncated oscillator |0>..|n_fock-1>.
// Composite index = level * n_fock + fock.
struct SpaceDims {
    static constexpr int n_levels = 3;
    int n_fock = 15;

    int dim() const { return n_levels * n_fock; }
    void validate() const;
    bool operator==(const SpaceDims&) const = default;
};

class QOperator {
public:
    explicit QOperator(SpaceDims dims);
    QOperator(SpaceDims dims, Matrix data);

    static QOperator identity(SpaceDims dims);

    const SpaceDims& dims() const { return dims_; }
    const Matrix& data() const { return data_; }
    Matrix& data() { return data_; }

    Complex trace() const { return data_.trace(); }
    QOperator adjoint() const { return {dims_, data_.adjoint()}; }
    // Tr{this * other}
    Complex trace_with(const QOperator& other) const;

    QOperator& operator+=(const QOperator& o);
    QOperator& operator-=(const QOperator& o);
    QOperator& operator*=(Complex c);

    friend QOperator operator+(QOperator a, const QOperator& b) { return a += b; }
    friend QOperator operator-(QOperator a, const QOperator& b) { return a -= b; }
    friend QOperator operator*(const QOperator& a, const QOperator& b);
    friend QOperator operator*(QOperator a, Complex c) { return a *= c; }
    friend QOperator operator*(Complex c, QOperator a) { return a *= c; }

private:
    SpaceDims dims_;
    Matrix data_;
};

// Single-factor building blocks.
Matrix fock_annihilation(int n_fock);
Matrix fock_quadrature(int n_fock);  // a + a†, truncated

// exp(i θ (a+a†)) on the truncated space through one eigendecomposition of the
// tridiagonal generator; reused for many θ.
class QuadratureExponential {
public:
    explicit QuadratureExponential(int n_fock);
    Matrix operator()(double theta) const;
    const RealVector& positions() const { return positions_; }
    const Matrix& basis() const { return basis_; }

private:
    RealVector positions_;
    Matrix basis_;
};

// Geometric occupation p_n ∝ (n̄/(1+n̄))^n renormalized on the truncated space.
RealVector thermal_populations(double n_bar, int n_fock);

// A (3x3) ⊗ B (n_fock x n_fock) in the composite layout.
QOperator embed(SpaceDims dims, const Matrix& atom, const Matrix& fock);

QOperator annihilation(SpaceDims dims);
QOperator number(SpaceDims dims);
QOperator atomic(SpaceDims dims, Level i, Level j);
// exp(sign * i * eta * (a+a†)) on the motional factor.
QOperator plane_wave(SpaceDims dims, double eta, int sign);
// sin(eta * (a+a†)) on the motional factor.
QOperator standing_wave(SpaceDims dims, double eta);

// Motional part as an n_fock x n_fock matrix, or 3x3 electronic part.
Matrix partial_trace_atom(const QOperator& op);
Matrix partial_trace_motion(const QOperator& op);

}  // namespace qjumps
