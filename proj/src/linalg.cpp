#include "qjumps/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <lapacke.h>

#include "qjumps/errors.hpp"

namespace qjumps::linalg {

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

Matrix unvec(const Vector& v, Eigen::Index d) { return Eigen::Map<const Matrix>(v.data(), d, d); }

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

EigenPairs eig_general(const Matrix& a) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Matrix work = a;
    EigenPairs out;
    out.values.resize(n);
    out.right.resize(n, n);
    lapack_complex_double dummy;
    const lapack_int info = LAPACKE_zgeev(
        LAPACK_COL_MAJOR, 'N', 'V', n, reinterpret_cast<lapack_complex_double*>(work.data()), n,
        reinterpret_cast<lapack_complex_double*>(out.values.data()), &dummy, 1,
        reinterpret_cast<lapack_complex_double*>(out.right.data()), n);
    if (info != 0) throw NearDefective("zgeev failed with info = " + std::to_string(info));

    Eigen::PartialPivLU<Matrix> lu(out.right);
    if (!(lu.rcond() > 1e3 * std::numeric_limits<double>::epsilon()))
        throw NearDefective("eigenvector matrix is numerically singular (rcond " +
                            std::to_string(lu.rcond()) + ")");
    out.dual = lu.inverse();
    return out;
}

double min_pair_condition(const EigenPairs& e) {
    double worst = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < e.values.size(); ++i)
        worst = std::min(worst, 1.0 / (e.dual.row(i).norm() * e.right.col(i).norm()));
    return worst;
}

Quadrature gauss_legendre(int order) {
    if (order < 1) throw InvalidParams("quadrature order must be positive");
    RealMatrix jacobi = RealMatrix::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(jacobi);
    Quadrature q;
    for (int k = 0; k < order; ++k) {
        q.nodes.push_back(es.eigenvalues()(k));
        const double v0 = es.eigenvectors()(0, k);
        q.weights.push_back(2.0 * v0 * v0);
    }
    return q;
}

}  // namespace qjumps::linalg

namespace qjumps::linalg {

LuSolution lu_solve(Matrix a, const Vector& b) {
    const lapack_int n = static_cast<lapack_int>(a.rows());
    auto* pa = reinterpret_cast<lapack_complex_double*>(a.data());
    const double anorm = LAPACKE_zlange(LAPACK_COL_MAJOR, '1', n, n, pa, n);
    std::vector<lapack_int> pivots(n);
    LuSolution out;
    lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, pa, n, pivots.data());
    if (info > 0) return out;  // exactly singular: rcond stays 0
    if (info < 0) throw InvalidParams("zgetrf argument error");
    LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n, pa, n, anorm, &out.rcond);
    out.x = b;
    LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, 1, pa, n, pivots.data(),
                   reinterpret_cast<lapack_complex_double*>(out.x.data()), n);
    return out;
}

}  // namespace qjumps::linalg
