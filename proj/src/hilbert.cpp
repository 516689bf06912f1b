#include "qjumps/hilbert.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "qjumps/errors.hpp"
#include "qjumps/linalg.hpp"

namespace qjumps {

void SpaceDims::validate() const {
    if (n_fock < 2) throw InvalidParams("n_fock must be at least 2, got " + std::to_string(n_fock));
}

QOperator::QOperator(SpaceDims dims) : dims_(dims) {
    dims_.validate();
    data_ = Matrix::Zero(dims_.dim(), dims_.dim());
}

QOperator::QOperator(SpaceDims dims, Matrix data) : dims_(dims), data_(std::move(data)) {
    dims_.validate();
    if (data_.rows() != dims_.dim() || data_.cols() != dims_.dim())
        throw InvalidParams("operator shape does not match the composite dimension");
}

QOperator QOperator::identity(SpaceDims dims) {
    return {dims, Matrix::Identity(dims.dim(), dims.dim())};
}

Complex QOperator::trace_with(const QOperator& other) const {
    // Tr{AB} = sum_ij A_ij B_ji
    return data_.cwiseProduct(other.data_.transpose()).sum();
}

QOperator& QOperator::operator+=(const QOperator& o) {
    data_ += o.data_;
    return *this;
}
QOperator& QOperator::operator-=(const QOperator& o) {
    data_ -= o.data_;
    return *this;
}
QOperator& QOperator::operator*=(Complex c) {
    data_ *= c;
    return *this;
}

QOperator operator*(const QOperator& a, const QOperator& b) {
    if (!(a.dims_ == b.dims_)) throw InvalidParams("operator dimensions differ");
    return {a.dims_, a.data_ * b.data_};
}

Matrix fock_annihilation(int n_fock) {
    Matrix a = Matrix::Zero(n_fock, n_fock);
    for (int n = 1; n < n_fock; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Matrix fock_quadrature(int n_fock) {
    Matrix a = fock_annihilation(n_fock);
    return a + a.adjoint();
}

QuadratureExponential::QuadratureExponential(int n_fock) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(fock_quadrature(n_fock).real());
    positions_ = es.eigenvalues();
    basis_ = es.eigenvectors().cast<Complex>();
}

Matrix QuadratureExponential::operator()(double theta) const {
    Vector phase(positions_.size());
    for (Eigen::Index k = 0; k < positions_.size(); ++k) phase(k) = std::exp(I_UNIT * theta * positions_(k));
    return basis_ * phase.asDiagonal() * basis_.adjoint();
}

RealVector thermal_populations(double n_bar, int n_fock) {
    if (!(n_bar >= 0.0)) throw InvalidParams("mean occupation must be non-negative");
    RealVector p(n_fock);
    const double q = n_bar / (1.0 + n_bar);
    double w = 1.0;
    for (int n = 0; n < n_fock; ++n, w *= q) p(n) = w;
    return p / p.sum();
}

QOperator embed(SpaceDims dims, const Matrix& atom, const Matrix& fock) {
    return {dims, linalg::kron(atom, fock)};
}

namespace {
Matrix level_matrix(Level i, Level j) {
    Matrix m = Matrix::Zero(3, 3);
    m(static_cast<int>(i), static_cast<int>(j)) = 1.0;
    return m;
}
}  // namespace

QOperator annihilation(SpaceDims dims) {
    dims.validate();
    return embed(dims, Matrix::Identity(3, 3), fock_annihilation(dims.n_fock));
}

QOperator number(SpaceDims dims) {
    dims.validate();
    Matrix a = fock_annihilation(dims.n_fock);
    return embed(dims, Matrix::Identity(3, 3), a.adjoint() * a);
}

QOperator atomic(SpaceDims dims, Level i, Level j) {
    dims.validate();
    return embed(dims, level_matrix(i, j), Matrix::Identity(dims.n_fock, dims.n_fock));
}

QOperator plane_wave(SpaceDims dims, double eta, int sign) {
    dims.validate();
    QuadratureExponential ex(dims.n_fock);
    return embed(dims, Matrix::Identity(3, 3), ex(sign >= 0 ? eta : -eta));
}

QOperator standing_wave(SpaceDims dims, double eta) {
    dims.validate();
    QuadratureExponential ex(dims.n_fock);
    Matrix s = (ex(eta) - ex(-eta)) / (2.0 * I_UNIT);
    return embed(dims, Matrix::Identity(3, 3), s);
}

Matrix partial_trace_atom(const QOperator& op) {
    const int n = op.dims().n_fock;
    Matrix out = Matrix::Zero(n, n);
    for (int l = 0; l < 3; ++l) out += op.data().block(l * n, l * n, n, n);
    return out;
}

Matrix partial_trace_motion(const QOperator& op) {
    const int n = op.dims().n_fock;
    Matrix out(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out(i, j) = op.data().block(i * n, j * n, n, n).trace();
    return out;
}

}  // namespace qjumps
