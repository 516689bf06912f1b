#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "qjumps/errors.hpp"
#include "qjumps/internal.hpp"
#include "qjumps/linalg.hpp"
#include "qjumps/liouville.hpp"

using namespace qjumps;

namespace {

Matrix random_hermitian(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
    return 0.5 * (m + m.adjoint());
}

Matrix random_matrix(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = Complex(n(rng), n(rng));
    return m;
}

SystemParams small(int n_fock) {
    SystemParams p = SystemParams::reference();
    p.n_fock = n_fock;
    return p;
}

// One classical RK4 step of dx/dt = A x written as a matrix polynomial.
Matrix rk4_step(const Matrix& a, double h) {
    const Eigen::Index n = a.rows();
    const Matrix ha = h * a;
    Matrix term = Matrix::Identity(n, n);
    Matrix step = term;
    for (int k = 1; k <= 4; ++k) {
        term = (term * ha / double(k)).eval();
        step += term;
    }
    return step;
}

// Applies step^count by binary powering.
Vector advance(const std::vector<Matrix>& powers, Vector v, std::uint64_t count) {
    for (std::size_t bit = 0; count; ++bit, count >>= 1)
        if (count & 1u) v = powers.at(bit) * v;
    return v;
}

}  // namespace

TEST_CASE("hamiltonian structure") {
    SystemParams p = small(6);
    const QOperator h = build_hamiltonian(p);
    CHECK((h.data() - h.data().adjoint()).norm() == 0.0);

    // Without recoil the motion factorizes and the standing-wave coupling vanishes.
    p.eta1 = p.eta2 = 0.0;
    const Matrix h0 = build_hamiltonian(p).data();
    const int n = p.n_fock;
    CHECK(h0.block(2 * n, 0, n, n).norm() == 0.0);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const Matrix blk = h0.block(a * n, b * n, n, n);
            const Matrix off = blk - Matrix(blk.diagonal().asDiagonal());
            CHECK(off.norm() < 1e-14);
        }

    // Perpendicular laser on the metastable transition.
    SystemParams q = small(6);
    q.phi2 = std::numbers::pi / 2.0;
    const Matrix hq = build_hamiltonian(q).data();
    CHECK(hq.block(2 * n, 0, n, n).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(hq.block(0, 2 * n, n, n).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("dipole pattern quadrature") {
    for (int order : {3, 4, 8}) {
        const auto rule = linalg::gauss_legendre(order);
        double norm = 0.0, second = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double u = rule.nodes[i];
            norm += rule.weights[i] * dipole_pattern(u);
            second += rule.weights[i] * dipole_pattern(u) * u * u;
        }
        CHECK(std::abs(norm - 1.0) < 1e-14);
        CHECK(std::abs(second - 0.4) < 1e-14);
    }
}

TEST_CASE("dissipator without recoil is the bare three-level decay") {
    SystemParams p = small(4);
    p.eta1 = p.eta2 = 0.0;
    const SuperOperator k = build_dissipator(p);
    const SpaceDims dims{p.n_fock};
    SuperOperator bare = SuperOperator::zero(dims);
    const Level levels[2] = {Level::e1, Level::e2};
    const double gammas[2] = {p.gamma1, p.gamma2};
    for (int j = 0; j < 2; ++j) {
        const QOperator lower = atomic(dims, Level::g, levels[j]);
        const QOperator proj = atomic(dims, levels[j], levels[j]);
        bare += Complex(gammas[j]) * SuperOperator::sandwich(lower);
        bare += Complex(-0.5 * gammas[j]) * (SuperOperator::left(proj) + SuperOperator::right(proj));
    }
    CHECK((k.data() - bare.data()).norm() < 1e-12);
}

TEST_CASE("liouvillian preserves trace and hermiticity") {
    const SystemParams p = small(8);
    const SuperOperator L = build_liouvillian(p);
    const int d = L.dims().dim();
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const QOperator rho{L.dims(), random_hermitian(d, rng)};
        const QOperator out = L.apply(rho);
        CHECK(std::abs(out.trace()) < 1e-10);
        CHECK((out.data() - out.data().adjoint()).norm() < 1e-10 * (1.0 + out.data().norm()));
    }
    const Vector trace_row = linalg::vec(Matrix::Identity(d, d));
    CHECK((trace_row.transpose() * L.data()).norm() < 1e-10 * L.data().norm());
}

TEST_CASE("steady state and eigenvalues at the reference point") {
    const SystemParams p = SystemParams::reference();
    const SuperOperator L = build_liouvillian(p);
    const QOperator rho = steady_state(L);
    CHECK(L.apply(rho).data().norm() < 1e-10 * L.data().norm());
    CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(rho.data()).eigenvalues().minCoeff() > -1e-10);

    const SpectralDecomposition dec = spectral_decomposition(L);
    const Vector& ev = dec.eigenvalues();
    CHECK(ev.real().maxCoeff() <= 1e-8);
    int zeros = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) < 1e-8) ++zeros;
    CHECK(zeros == 1);

    // Conjugate pairing of the spectrum.
    double worst = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < ev.size(); ++j) best = std::min(best, std::abs(ev(j) - std::conj(ev(i))));
        worst = std::max(worst, best);
    }
    CHECK(worst < 1e-8);

    // The left element of the stationary pole is the identity.
    const QOperator left0 = dec.left(dec.stationary_index());
    const Complex scale = left0.data()(0, 0);
    const int d = L.dims().dim();
    CHECK((left0.data() / scale - Matrix::Identity(d, d)).norm() < 1e-8);

    // Stationary right element matches the linear-solve steady state.
    QOperator right0 = dec.right(dec.stationary_index());
    right0 *= 1.0 / right0.trace();
    CHECK((right0.data() - rho.data()).norm() < 1e-8);
}

TEST_CASE("no recoil leaves the motional state undetermined") {
    SystemParams p = small(5);
    p.eta1 = p.eta2 = 0.0;
    CHECK_THROWS_AS(steady_state(build_liouvillian(p)), NonUniqueSteadyState);
}

TEST_CASE("spectral decomposition completeness") {
    const SystemParams p = small(6);
    const SuperOperator L = build_liouvillian(p);
    const SpectralDecomposition dec = spectral_decomposition(L);
    const int d = L.dims().dim();
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const QOperator x{L.dims(), random_matrix(d, rng)};
        const QOperator back = dec.reconstruct(dec.coefficients(x));
        CHECK((back.data() - x.data()).norm() < 1e-8 * x.data().norm());
    }
    // Biorthonormal pairing.
    for (std::size_t i = 0; i < dec.size(); i += 17)
        for (std::size_t j = 0; j < dec.size(); j += 23) {
            const Complex t = dec.left(i).trace_with(dec.right(j));
            CHECK(std::abs(t - (i == j ? 1.0 : 0.0)) < 1e-8);
        }
}

TEST_CASE("eigenvalues without recoil form the internal lattice") {
    SystemParams p = small(4);
    p.eta1 = p.eta2 = 0.0;
    const SpectralDecomposition dec = spectral_decomposition(build_liouvillian(p));
    const Vector internal = Eigen::ComplexEigenSolver<Matrix>(internal_liouvillian(p)).eigenvalues();
    const Vector& ev = dec.eigenvalues();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < internal.size(); ++k)
            for (int ell = -(p.n_fock - 1); ell <= p.n_fock - 1; ++ell)
                best = std::min(best, std::abs(ev(i) - internal(k) - I_UNIT * double(ell)));
        worst = std::max(worst, best);
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("eigen propagation agrees with fourth-order stepping") {
    const SystemParams p = small(8);
    const SuperOperator L = build_liouvillian(p);
    const SpectralDecomposition dec = spectral_decomposition(L);
    const SpaceDims dims{p.n_fock};

    Matrix atom = Matrix::Zero(3, 3);
    atom(0, 0) = 1.0;
    Matrix fock = Matrix::Zero(p.n_fock, p.n_fock);
    fock(1, 1) = 1.0;
    const QOperator rho0 = embed(dims, atom, fock);

    const double h = 0.005;
    std::vector<Matrix> powers{rk4_step(L.data(), h)};
    const double t_end = 10.0 / p.gamma2;
    const auto total_steps = static_cast<std::uint64_t>(std::llround(t_end / h));
    while ((std::uint64_t{1} << powers.size()) <= total_steps) powers.push_back(powers.back() * powers.back());

    double worst = 0.0;
    for (double t : {0.5, 2.0, 10.0, 60.0, 250.0, t_end}) {
        const auto steps = static_cast<std::uint64_t>(std::llround(t / h));
        const Vector stepped = advance(powers, linalg::vec(rho0.data()), steps);
        const Vector exact = linalg::vec(dec.propagate(rho0, double(steps) * h).data());
        worst = std::max(worst, (stepped - exact).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("correlation spectrum sum rule and positivity") {
    const SystemParams p = small(8);
    const SuperOperator L = build_liouvillian(p);
    const SpectralDecomposition dec = spectral_decomposition(L);
    const QOperator rho = steady_state(L);
    const SpaceDims dims{p.n_fock};
    const QOperator d = atomic(dims, Level::g, Level::e1);

    std::vector<double> grid;
    for (int i = 0; i <= 800; ++i) grid.push_back(-4.0 + 0.01 * i);
    const SpectrumResult s = correlation_spectrum(dec, d, rho, grid);
    Complex total = 0.0;
    for (const auto& l : s.lines) total += l.weight;
    const Complex expected = (d.adjoint() * d).trace_with(rho);
    CHECK(std::abs(total - expected) < 1e-8);

    const double peak = *std::max_element(s.total.begin(), s.total.end());
    CHECK(peak > 0.0);
    CHECK(*std::min_element(s.total.begin(), s.total.end()) >= -1e-10 * peak);
    for (double v : s.total) CHECK(std::isfinite(v));
}

TEST_CASE("spectrum without recoil matches time-domain regression") {
    SystemParams p = SystemParams::reference();
    p.eta1 = p.eta2 = 0.0;
    p.n_fock = 2;
    const SpaceDims dims{p.n_fock};

    // Motion decouples: stationary state is internal ⊗ vacuum.
    const Matrix rho_int = internal_steady_state(p).rho;
    Matrix vac = Matrix::Zero(2, 2);
    vac(0, 0) = 1.0;
    const QOperator rho = embed(dims, rho_int, vac);
    const SpectralDecomposition dec = spectral_decomposition(build_liouvillian(p));
    const QOperator d = atomic(dims, Level::g, Level::e1);
    const std::vector<double> grid = {-7.0, -6.0, -3.0, -1.0, -0.2, 0.3, 1.0, 4.0, 6.5};
    const SpectrumResult s = correlation_spectrum(dec, d, rho, grid);

    // Regression on the 3x3 internal space, stepped by a fourth-order polynomial
    // propagator: g(τ) = Tr{σ⁺ e^{L τ}(σ⁻ ρ)} minus its stationary limit.
    const Matrix li = internal_liouvillian(p);
    Matrix lower = Matrix::Zero(3, 3);
    lower(0, 1) = 1.0;
    const Complex mean = (lower * rho_int).trace();
    const Complex coherent = std::conj(mean) * mean;
    const double h = 2e-3;
    const Matrix step = rk4_step(li, h);
    Vector x = linalg::vec(lower * rho_int);
    const Vector raise_row = linalg::vec(lower.adjoint().transpose());
    const double t_end = 30.0 / p.gamma2;
    const auto steps = 2 * static_cast<std::size_t>(t_end / (2.0 * h));
    std::vector<Complex> acc(grid.size(), 0.0);
    auto g_of = [&](const Vector& v) { return Complex((raise_row.transpose() * v)(0)) - coherent; };
    // Composite Simpson rule over an even number of steps.
    auto accumulate = [&](const Complex& g, double t, double weight) {
        for (std::size_t gi = 0; gi < grid.size(); ++gi) acc[gi] += weight * g * std::exp(-I_UNIT * grid[gi] * t);
    };
    accumulate(g_of(x), 0.0, h / 3.0);
    for (std::size_t k = 1; k <= steps; ++k) {
        x = step * x;
        const double w = k == steps ? 1.0 : (k % 2 ? 4.0 : 2.0);
        accumulate(g_of(x), k * h, w * h / 3.0);
    }
    const double scale = *std::max_element(s.total.begin(), s.total.end());
    for (std::size_t gi = 0; gi < grid.size(); ++gi) CHECK(std::abs(acc[gi].real() - s.total[gi]) < 1e-6 * scale);
    CHECK(std::abs(s.elastic_weight - coherent.real()) < 1e-10);
}
