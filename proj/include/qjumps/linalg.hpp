#pragma once

#include <vector>

#include "qjumps/types.hpp"

namespace qjumps::linalg {

// Column-stacking vectorization: vec(A X B) = (Bᵀ ⊗ A) vec(X).
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Eigen::Index d);

Matrix kron(const Matrix& a, const Matrix& b);

// Right eigenvectors as columns and their dual rows (the inverse matrix), so
// that dual.row(i) * right.col(j) = δ_ij.
struct EigenPairs {
    Vector values;
    Matrix right;
    Matrix dual;
};

// General complex eigenproblem through LAPACK zgeev.
EigenPairs eig_general(const Matrix& a);

// Smallest 1/(|dual_i| |right_i|) over all pairs; tiny values flag a nearly
// defective matrix.
double min_pair_condition(const EigenPairs& e);

struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss–Legendre rule on [-1, 1] by the Golub–Welsch construction.
Quadrature gauss_legendre(int order);

}  // namespace qjumps::linalg

namespace qjumps::linalg {

// Dense LU solve with LAPACK, also returning the reciprocal condition
// estimate in the 1-norm.
struct LuSolution {
    Vector x;
    double rcond = 0.0;
};
LuSolution lu_solve(Matrix a, const Vector& b);

}  // namespace qjumps::linalg
