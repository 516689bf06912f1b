#include <doctest.h>

#include <cmath>

#include "qjumps/errors.hpp"
#include "qjumps/hilbert.hpp"

using namespace qjumps;

namespace {

// Top-left block on fock states n < limit of every atomic level.
double low_block_error(const Matrix& m, int n_fock, int limit) {
    double err = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            err = std::max(err, m.block(a * n_fock, b * n_fock, limit, limit).cwiseAbs().maxCoeff());
    return err;
}

}  // namespace

TEST_CASE("annihilation matrix elements") {
    const SpaceDims two{2};
    const QOperator a = annihilation(two);
    for (int level = 0; level < 3; ++level) {
        CHECK(std::abs(a.data()(level * 2 + 0, level * 2 + 1) - 1.0) < 1e-15);
        CHECK(std::abs(a.data()(level * 2 + 1, level * 2 + 0)) == 0.0);
    }

    const SpaceDims dims{10};
    const QOperator b = annihilation(dims);
    Vector vacuum = Vector::Zero(dims.dim());
    vacuum(0) = 1.0;
    CHECK((b.data() * vacuum).norm() == 0.0);

    const Matrix comm = b.data() * b.data().adjoint() - b.data().adjoint() * b.data();
    const Matrix diff = comm - Matrix::Identity(dims.dim(), dims.dim());
    CHECK(low_block_error(diff, dims.n_fock, dims.n_fock - 1) < 1e-14);
    // The top level is where truncation shows.
    CHECK(std::abs(diff(dims.n_fock - 1, dims.n_fock - 1)) > 1.0);
}

TEST_CASE("atomic projectors") {
    const SpaceDims dims{7};
    const QOperator sum = atomic(dims, Level::g, Level::g) + atomic(dims, Level::e1, Level::e1) +
                          atomic(dims, Level::e2, Level::e2);
    CHECK((sum.data() - Matrix::Identity(dims.dim(), dims.dim())).norm() == 0.0);

    const QOperator prod = atomic(dims, Level::e1, Level::g) * atomic(dims, Level::g, Level::e1);
    CHECK((prod.data() - atomic(dims, Level::e1, Level::e1).data()).norm() == 0.0);
    CHECK(std::abs(atomic(dims, Level::g, Level::g).trace() - 7.0) == 0.0);
}

TEST_CASE("atomic and motional factors commute") {
    const SpaceDims dims{6};
    const QOperator a = annihilation(dims);
    for (Level i : {Level::g, Level::e1, Level::e2})
        for (Level j : {Level::g, Level::e1, Level::e2}) {
            const QOperator s = atomic(dims, i, j);
            CHECK((s * a - a * s).data().norm() < 1e-15);
        }
}

TEST_CASE("plane wave") {
    const SpaceDims dims{12};
    CHECK((plane_wave(dims, 0.0, +1).data() - Matrix::Identity(dims.dim(), dims.dim())).norm() < 1e-13);

    const double eta = 0.05;
    const QOperator up = plane_wave(dims, eta, +1);
    CHECK(std::abs(up.data()(0, 0) - std::exp(-eta * eta / 2.0)) < 1e-13);
    CHECK(std::abs(up.data()(0, 0).real() - 0.99875) < 1e-5);

    const QOperator down = plane_wave(dims, eta, -1);
    const Matrix prod = (up * down).data() - Matrix::Identity(dims.dim(), dims.dim());
    CHECK(low_block_error(prod, dims.n_fock, dims.n_fock - 2) < 1e-13);

    // Unitary on the low subspace.
    const Matrix udu = up.data().adjoint() * up.data() - Matrix::Identity(dims.dim(), dims.dim());
    CHECK(low_block_error(udu, dims.n_fock, dims.n_fock - 2) < 1e-10);
    CHECK(up.data().allFinite());
}

TEST_CASE("standing wave") {
    const SpaceDims dims{12};
    CHECK(standing_wave(dims, 0.0).data().norm() < 1e-15);

    // Residual of the linear term shrinks as η³.
    auto residual = [&](double eta) {
        const Matrix linear = eta * (annihilation(dims).data() + annihilation(dims).data().adjoint());
        return low_block_error(standing_wave(dims, eta).data() - linear, dims.n_fock, dims.n_fock - 3);
    };
    const double r1 = residual(1e-3), r2 = residual(2e-3);
    CHECK(r1 < 1e-7);
    CHECK(std::log2(r2 / r1) == doctest::Approx(3.0).epsilon(0.01));

    const double eta2 = 0.05;
    const QOperator sw2 = standing_wave(dims, eta2);
    CHECK(std::abs(sw2.data()(1, 0) - eta2 * std::exp(-eta2 * eta2 / 2.0)) < std::pow(eta2, 3));
}

TEST_CASE("quadrature exponential matches eigenbasis construction") {
    const QuadratureExponential qe(9);
    const Matrix u = qe(0.3);
    const Matrix v = qe(-0.3);
    CHECK(((u * v) - Matrix::Identity(9, 9)).norm() < 1e-12);
    CHECK((u.adjoint() * u - Matrix::Identity(9, 9)).norm() < 1e-12);
}

TEST_CASE("thermal populations") {
    const RealVector p = thermal_populations(0.3, 15);
    CHECK(std::abs(p.sum() - 1.0) < 1e-14);
    CHECK(std::abs(p(1) / p(0) - 0.3 / 1.3) < 1e-14);
    const RealVector ground = thermal_populations(0.0, 15);
    CHECK(ground(0) == doctest::Approx(1.0));
}

TEST_CASE("partial traces") {
    const SpaceDims dims{5};
    Matrix atom = Matrix::Zero(3, 3);
    atom(1, 1) = 1.0;
    Matrix fock = Matrix::Zero(5, 5);
    fock(2, 2) = 0.25;
    fock(3, 3) = 0.75;
    const QOperator rho = embed(dims, atom, fock);
    CHECK((partial_trace_atom(rho) - fock).norm() < 1e-15);
    CHECK((partial_trace_motion(rho) - atom).norm() < 1e-15);
}

TEST_CASE("invalid truncation is rejected") {
    CHECK_THROWS_AS(SpaceDims{1}.validate(), InvalidParams);
    CHECK_THROWS_AS(annihilation(SpaceDims{0}), InvalidParams);
}
