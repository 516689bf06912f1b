#include <doctest.h>

#include <cmath>
#include <random>

#include "qjumps/cooling.hpp"
#include "qjumps/lamb_dicke.hpp"
#include "qjumps/linalg.hpp"

using namespace qjumps;

namespace {

SystemParams with_eta(double eta, int n_fock = 6) {
    SystemParams p = SystemParams::reference();
    p.eta1 = p.eta2 = eta;
    p.n_fock = n_fock;
    return p;
}

QOperator random_operator(SpaceDims dims, std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Matrix m(dims.dim(), dims.dim());
    for (int i = 0; i < dims.dim(); ++i)
        for (int j = 0; j < dims.dim(); ++j) m(i, j) = Complex(n(rng), n(rng));
    return {dims, m};
}

double slope(double x0, double y0, double x1, double y1) { return std::log(y1 / y0) / std::log(x1 / x0); }

}  // namespace

TEST_CASE("no recoil means no motional coupling") {
    const LDExpansion e = expand(with_eta(0.0));
    CHECK(first_order_generator(e).data().norm() == 0.0);
    CHECK(second_order_generator(e).data().norm() == 0.0);
    CHECK(first_order_vanishing_check(with_eta(0.0)).vanishes);
}

TEST_CASE("second derivative has no standing-wave part") {
    const LDExpansion e = expand(SystemParams::reference());
    CHECK(std::abs(e.V2(2, 0)) == 0.0);
    CHECK(std::abs(e.V2(0, 2)) == 0.0);
    CHECK(std::abs(e.V1(2, 0)) > 0.0);
}

TEST_CASE("expansion reproduces the full generator to third order") {
    std::vector<double> residual;
    const std::vector<double> etas = {0.02, 0.04, 0.08};
    for (double eta : etas) {
        const SystemParams p = with_eta(eta);
        const LDExpansion e = expand(p);
        const Matrix sum = zero_order_generator(e).data() + first_order_generator(e).data() +
                           second_order_generator(e).data();
        residual.push_back((build_liouvillian(p).data() - sum).norm());
    }
    CHECK(slope(etas[0], residual[0], etas[1], residual[1]) == doctest::Approx(3.0).epsilon(0.05));
    CHECK(slope(etas[1], residual[1], etas[2], residual[2]) == doctest::Approx(3.0).epsilon(0.05));
    // Same constant C for all three.
    const double c0 = residual[0] / std::pow(etas[0], 3), c2 = residual[2] / std::pow(etas[2], 3);
    CHECK(std::abs(c2 / c0 - 1.0) < 0.1);
}

TEST_CASE("first and second order generators scale as eta and eta squared") {
    const double lo = 0.01, hi = 0.1;
    const LDExpansion a = expand(with_eta(lo)), b = expand(with_eta(hi));
    const double l1 = slope(lo, first_order_generator(a).data().norm(), hi, first_order_generator(b).data().norm());
    const double l2 = slope(lo, second_order_generator(a).data().norm(), hi, second_order_generator(b).data().norm());
    CHECK(std::abs(l1 - 1.0) < 0.02);
    CHECK(std::abs(l2 - 2.0) < 0.02);
}

TEST_CASE("direct actions match the superoperators") {
    const SystemParams p = with_eta(0.05, 5);
    const LDExpansion e = expand(p);
    std::mt19937_64 rng(5);
    const QOperator x = random_operator(SpaceDims{p.n_fock}, rng);
    CHECK((apply_first_order(e, x).data() - first_order_generator(e).apply(x).data()).norm() < 1e-12 * x.data().norm());
    CHECK((apply_second_order(e, x).data() - second_order_generator(e).apply(x).data()).norm() <
          1e-12 * x.data().norm());
}

TEST_CASE("recoil diffusion preserves trace") {
    const LDExpansion e = expand(SystemParams::reference());
    const SuperOperator k2 = recoil_diffusion(e);
    const int d = k2.dims().dim();
    const Vector trace_row = linalg::vec(Matrix::Identity(d, d));
    CHECK((trace_row.transpose() * k2.data()).norm() < 1e-12 * (1.0 + k2.data().norm()));
    CHECK(k2.data().norm() > 0.0);
}

TEST_CASE("zero-order projectors") {
    const SystemParams p = with_eta(0.05, 6);
    const ZeroOrderFrame frame(p);
    const SpaceDims dims{p.n_fock};
    std::mt19937_64 rng(9);

    // Stationary internal state tensored with a diagonal motional state.
    Matrix mu = Matrix::Zero(p.n_fock, p.n_fock);
    for (int n = 0; n < p.n_fock; ++n) mu(n, n) = std::pow(0.3, n);
    const QOperator st = embed(dims, internal_steady_state(p).rho, mu);
    const Cluster stationary{frame.stationary_mode(), 0};
    CHECK((project_zero_order(frame, stationary, st).data() - st.data()).norm() < 1e-12);

    const QOperator x = random_operator(dims, rng);
    QOperator sum(dims);
    for (int k = 0; k < kInternalModes; ++k)
        for (int ell = -(p.n_fock - 1); ell <= p.n_fock - 1; ++ell) {
            const QOperator px = project_zero_order(frame, {k, ell}, x);
            const QOperator ppx = project_zero_order(frame, {k, ell}, px);
            CHECK((ppx.data() - px.data()).norm() < 1e-9 * (1.0 + px.data().norm()));
            sum += px;
        }
    CHECK((sum.data() - x.data()).norm() < 1e-10 * x.data().norm());
}

TEST_CASE("first-order term vanishes on degenerate subspaces") {
    const FirstOrderCheck ref = first_order_vanishing_check(SystemParams::reference());
    CHECK(ref.vanishes);
    CHECK(ref.resonances.empty());

    // Artificial resonance: with the first drive off and an almost stable
    // metastable level, δ2 = -1 puts λ_{1-} at -iν, on top of the stationary
    // cluster one motional step away, and the first-order term couples them.
    SystemParams p = with_eta(0.05, 6);
    p.omega1 = 0.0;
    p.gamma2 = 1e-7;
    p.delta2 = -1.0;
    const Complex l1m = internal_eigensystem(p).mode(InternalMode::one_minus).lambda;
    CHECK(std::abs(l1m + I_UNIT) < 1e-6);
    const FirstOrderCheck res = first_order_vanishing_check(p);
    CHECK_FALSE(res.vanishes);
    CHECK_FALSE(res.resonances.empty());
    CHECK(res.max_norm > 1e-3);
}

TEST_CASE("perturbative stationary state matches the rate equation") {
    const SystemParams p = SystemParams::reference();
    const PerturbationEngine engine(p);
    const auto st = engine.steady_expansion();
    const RealVector rate = rate_equation_stationary(cooling_rates(p), p.n_fock);
    CHECK((st.motional - rate).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(st.order0.trace() - 1.0) < 1e-12);
    CHECK(std::abs(st.order1.trace()) < 1e-10);
    CHECK(std::abs(st.order2.trace()) < 1e-10);

    // ϱ1 solves the first-order stationary equation L0 ϱ1 + L1 ϱ0 = 0.
    const LDExpansion& e = engine.expansion();
    const QOperator r1 = zero_order_generator(e).apply(st.order1) + engine.L1(st.order0);
    CHECK(r1.data().norm() < 1e-10);

    // Forcing a thermal occupation replaces the motional populations.
    const auto forced = engine.steady_expansion(0.6);
    const RealVector ns = RealVector::LinSpaced(p.n_fock, 0.0, p.n_fock - 1.0);
    CHECK(std::abs(forced.motional.dot(ns) - 0.6) < 1e-3);
}

TEST_CASE("resolvent inverts the zero-order generator off the cluster") {
    const SystemParams p = with_eta(0.05, 6);
    const PerturbationEngine engine(p);
    std::mt19937_64 rng(21);
    const QOperator x = random_operator(SpaceDims{p.n_fock}, rng);
    const Cluster c{engine.frame().stationary_mode(), 0};
    const QOperator s = engine.resolvent(c, x);
    // (λ_c - L0) S x = x - P0 x
    const QOperator lhs = zero_order_generator(engine.expansion()).apply(s) * Complex(-1.0) +
                          s * engine.frame().eigenvalue(c);
    const QOperator rhs = x - engine.project(c, x);
    CHECK((lhs.data() - rhs.data()).norm() < 1e-9 * x.data().norm());
    CHECK(engine.project(c, s).data().norm() < 1e-9 * x.data().norm());
}
