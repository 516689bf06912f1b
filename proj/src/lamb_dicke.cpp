#include "qjumps/lamb_dicke.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "qjumps/errors.hpp"
#include "qjumps/linalg.hpp"

namespace qjumps {

namespace {

Matrix unit3(int i, int j) {
    Matrix m = Matrix::Zero(3, 3);
    m(i, j) = 1.0;
    return m;
}

struct CompositePieces {
    Matrix h1;       // V1 ⊗ X
    Matrix h2_half;  // (V2 ⊗ X²)/2
    Matrix x;        // 1 ⊗ X
    Matrix x2;       // 1 ⊗ X²
    Matrix lower[2]; // |g><j| ⊗ 1
};

CompositePieces pieces(const LDExpansion& e) {
    const int n = e.params.n_fock;
    const Matrix x = fock_quadrature(n);
    const Matrix x2 = x * x;
    CompositePieces c;
    c.h1 = linalg::kron(e.V1, x);
    c.h2_half = 0.5 * linalg::kron(e.V2, x2);
    c.x = linalg::kron(Matrix::Identity(3, 3), x);
    c.x2 = linalg::kron(Matrix::Identity(3, 3), x2);
    for (int j = 0; j < 2; ++j) c.lower[j] = linalg::kron(unit3(0, j + 1), Matrix::Identity(n, n));
    return c;
}

}  // namespace

LDExpansion expand(const SystemParams& p) {
    p.validate();
    LDExpansion e;
    e.params = p;
    e.L0_internal = internal_liouvillian(p);
    const double k1 = p.eta1 * std::cos(p.phi1);
    const double k2 = p.eta2 * std::cos(p.phi2);
    // d/dx of (Ω1/2)|1><g| e^{i k1 x} + h.c. and of (Ω2/2) sin(k2 x)(|2><g| + h.c.)
    e.V1 = 0.5 * p.omega1 * I_UNIT * k1 * (unit3(1, 0) - unit3(0, 1)) + 0.5 * p.omega2 * k2 * (unit3(2, 0) + unit3(0, 2));
    e.V2 = -0.5 * p.omega1 * k1 * k1 * (unit3(1, 0) + unit3(0, 1));
    e.diffusion = {0.5 * kPatternSecondMoment * p.gamma1 * p.eta1 * p.eta1,
                   0.5 * kPatternSecondMoment * p.gamma2 * p.eta2 * p.eta2};
    return e;
}

SuperOperator zero_order_generator(const LDExpansion& e) {
    SystemParams rest = e.params;
    rest.eta1 = 0.0;
    rest.eta2 = 0.0;
    return build_liouvillian(rest);
}

SuperOperator first_order_generator(const LDExpansion& e) {
    const SpaceDims dims{e.params.n_fock};
    return SuperOperator::commutator(QOperator(dims, pieces(e).h1));
}

SuperOperator recoil_diffusion(const LDExpansion& e) {
    const SpaceDims dims{e.params.n_fock};
    const auto c = pieces(e);
    SuperOperator k = SuperOperator::zero(dims);
    for (int j = 0; j < 2; ++j) {
        const Matrix& a = c.lower[j];
        const Matrix ax = a * c.x;
        const Matrix ax2 = a * c.x2;
        // vec(B ρ C) = (Cᵀ ⊗ B) vec(ρ)
        const Matrix term = 2.0 * linalg::kron(ax.conjugate(), ax) -
                            linalg::kron(a.adjoint().transpose(), ax2) -
                            linalg::kron((c.x2 * a.adjoint()).transpose(), a);
        k.data() += e.diffusion[j] * term;
    }
    return k;
}

SuperOperator second_order_generator(const LDExpansion& e) {
    const SpaceDims dims{e.params.n_fock};
    return SuperOperator::commutator(QOperator(dims, pieces(e).h2_half)) + recoil_diffusion(e);
}

QOperator apply_first_order(const LDExpansion& e, const QOperator& x) {
    const int n = e.params.n_fock;
    const Matrix q = fock_quadrature(n);
    // [V1 ⊗ X, Y] blockwise: block(i,j) of (V1⊗X)Y is Σ_l V1(i,l) X Y(l,j)
    const Matrix h1 = linalg::kron(e.V1, q);
    return {x.dims(), -I_UNIT * (h1 * x.data() - x.data() * h1)};
}

QOperator apply_second_order(const LDExpansion& e, const QOperator& x) {
    const auto c = pieces(e);
    const Matrix& y = x.data();
    Matrix out = -I_UNIT * (c.h2_half * y - y * c.h2_half);
    for (int j = 0; j < 2; ++j) {
        if (e.diffusion[j] == 0.0) continue;
        const Matrix inner = 2.0 * c.x * y * c.x - c.x2 * y - y * c.x2;
        out += e.diffusion[j] * (c.lower[j] * inner * c.lower[j].adjoint());
    }
    return {x.dims(), out};
}

ZeroOrderFrame::ZeroOrderFrame(const SystemParams& p)
    : n_fock_(p.n_fock), internal_(internal_eigensystem(p)) {
    right_ = internal_.right_matrix();
    dual_ = internal_.dual_matrix();
}

Coefficients ZeroOrderFrame::coefficients(const QOperator& x) const {
    const int n = n_fock_;
    Coefficients c;
    for (auto& m : c) m = Matrix::Zero(n, n);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            const int q = i + 3 * j;
            const auto block = x.data().block(i * n, j * n, n, n);
            for (int k = 0; k < kInternalModes; ++k) {
                const Complex w = dual_(k, q);
                if (w != Complex(0.0)) c[k] += w * block;
            }
        }
    return c;
}

QOperator ZeroOrderFrame::assemble(const Coefficients& c) const {
    const int n = n_fock_;
    const SpaceDims dims{n};
    Matrix out = Matrix::Zero(dims.dim(), dims.dim());
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
            const int q = i + 3 * j;
            auto block = out.block(i * n, j * n, n, n);
            for (int k = 0; k < kInternalModes; ++k) {
                const Complex w = right_(q, k);
                if (w != Complex(0.0)) block += w * c[k];
            }
        }
    return {dims, out};
}

std::vector<int> ZeroOrderFrame::rows(int ell) const {
    std::vector<int> r;
    for (int n = 0; n < n_fock_; ++n)
        if (n + ell >= 0 && n + ell < n_fock_) r.push_back(n);
    return r;
}

QOperator project_zero_order(const ZeroOrderFrame& frame, const Cluster& cl, const QOperator& x) {
    const Coefficients c = frame.coefficients(x);
    Coefficients out;
    const int n = frame.n_fock();
    for (auto& m : out) m = Matrix::Zero(n, n);
    for (int r : frame.rows(cl.ell)) out[cl.k](r, r + cl.ell) = c[cl.k](r, r + cl.ell);
    return frame.assemble(out);
}

FirstOrderCheck first_order_vanishing_check(const SystemParams& p) {
    const LDExpansion e = expand(p);
    const ZeroOrderFrame frame(p);
    const int n = p.n_fock;

    std::vector<Cluster> clusters;
    for (int k = 0; k < kInternalModes; ++k)
        for (int ell = -(n - 1); ell <= n - 1; ++ell) clusters.push_back({k, ell});

    // group clusters with coinciding zero-order eigenvalues
    std::vector<int> group(clusters.size());
    std::iota(group.begin(), group.end(), 0);
    for (std::size_t a = 0; a < clusters.size(); ++a)
        for (std::size_t b = a + 1; b < clusters.size(); ++b)
            if (std::abs(frame.eigenvalue(clusters[a]) - frame.eigenvalue(clusters[b])) < 1e-6) {
                const int ga = group[a], gb = group[b];
                for (auto& g : group)
                    if (g == gb) g = ga;
            }

    FirstOrderCheck out;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
        if (group[a] != static_cast<int>(a)) continue;
        std::vector<std::size_t> members;
        for (std::size_t b = 0; b < clusters.size(); ++b)
            if (group[b] == group[a]) members.push_back(b);
        double norm2 = 0.0;
        for (std::size_t src : members) {
            const Cluster cs = clusters[src];
            for (int r : frame.rows(cs.ell)) {
                Coefficients unit;
                for (auto& m : unit) m = Matrix::Zero(n, n);
                unit[cs.k](r, r + cs.ell) = 1.0;
                const Coefficients image = frame.coefficients(apply_first_order(e, frame.assemble(unit)));
                for (std::size_t dst : members) {
                    const Cluster cd = clusters[dst];
                    double block = 0.0;
                    for (int q : frame.rows(cd.ell)) block += std::norm(image[cd.k](q, q + cd.ell));
                    norm2 += block;
                    if (dst != src && std::sqrt(block) > 1e-9) {
                        bool seen = false;
                        for (const auto& [x, y] : out.resonances)
                            if ((x == cs && y == cd) || (x == cd && y == cs)) seen = true;
                        if (!seen) out.resonances.emplace_back(cs, cd);
                    }
                }
            }
        }
        out.max_norm = std::max(out.max_norm, std::sqrt(norm2));
    }
    out.vanishes = out.max_norm < 1e-9;
    return out;
}

PerturbationEngine::PerturbationEngine(const SystemParams& p) : expansion_(expand(p)), frame_(p) {}

QOperator PerturbationEngine::resolvent(const Cluster& cl, const QOperator& x) const {
    Coefficients c = frame_.coefficients(x);
    const int n = frame_.n_fock();
    const Complex center = frame_.eigenvalue(cl);
    for (int k = 0; k < kInternalModes; ++k) {
        const Complex lk = frame_.internal_eigenvalue(k);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (k == cl.k && b - a == cl.ell) {
                    c[k](a, b) = 0.0;
                    continue;
                }
                c[k](a, b) /= center - (lk + I_UNIT * double(b - a));
            }
    }
    return frame_.assemble(c);
}

Matrix PerturbationEngine::effective_generator(const Cluster& cl) const {
    const auto rows = frame_.rows(cl.ell);
    const int m = static_cast<int>(rows.size());
    const int n = frame_.n_fock();
    Matrix g(m, m);
    for (int a = 0; a < m; ++a) {
        Coefficients unit;
        for (auto& u : unit) u = Matrix::Zero(n, n);
        unit[cl.k](rows[a], rows[a] + cl.ell) = 1.0;
        const QOperator y = frame_.assemble(unit);
        const QOperator z = L2(y) + L1(resolvent(cl, L1(y)));
        const Coefficients cz = frame_.coefficients(z);
        for (int b = 0; b < m; ++b) g(b, a) = cz[cl.k](rows[b], rows[b] + cl.ell);
    }
    return g;
}

PerturbationEngine::FineModes PerturbationEngine::fine_modes(const Cluster& cl) const {
    FineModes fm;
    fm.cluster = cl;
    fm.rows = frame_.rows(cl.ell);
    const Matrix g = effective_generator(cl);
    Eigen::ComplexEigenSolver<Matrix> es(g);
    fm.shifts = es.eigenvalues();
    fm.right = es.eigenvectors();
    fm.dual = fm.right.inverse();
    return fm;
}

QOperator PerturbationEngine::project_mode(const FineModes& fm, int i, const QOperator& x) const {
    const Coefficients c = frame_.coefficients(x);
    const int m = static_cast<int>(fm.rows.size());
    const int ell = fm.cluster.ell;
    Vector v(m);
    for (int a = 0; a < m; ++a) v(a) = c[fm.cluster.k](fm.rows[a], fm.rows[a] + ell);
    const Vector y = fm.right.col(i) * (fm.dual.row(i) * v)(0);
    Coefficients out;
    const int n = frame_.n_fock();
    for (auto& u : out) u = Matrix::Zero(n, n);
    for (int a = 0; a < m; ++a) out[fm.cluster.k](fm.rows[a], fm.rows[a] + ell) = y(a);
    return frame_.assemble(out);
}

PerturbationEngine::SteadyExpansion PerturbationEngine::steady_expansion(std::optional<double> forced_n_bar) const {
    const int n = frame_.n_fock();
    const Cluster stationary{frame_.stationary_mode(), 0};
    SteadyExpansion out{RealVector::Zero(n), QOperator(SpaceDims{n}), QOperator(SpaceDims{n}), QOperator(SpaceDims{n})};
    if (forced_n_bar) {
        out.motional = thermal_populations(*forced_n_bar, n);
    } else {
        const Matrix g = effective_generator(stationary);
        Eigen::ComplexEigenSolver<Matrix> es(g);
        Eigen::Index zero = 0;
        es.eigenvalues().cwiseAbs().minCoeff(&zero);
        const Vector v = es.eigenvectors().col(zero);
        const Complex sum = v.sum();
        out.motional = (v / sum).real();
    }
    Coefficients c;
    for (auto& m : c) m = Matrix::Zero(n, n);
    for (int a = 0; a < n; ++a) c[stationary.k](a, a) = out.motional(a);
    out.order0 = frame_.assemble(c);
    out.order1 = resolvent(stationary, L1(out.order0));
    out.order2 = resolvent(stationary, L1(out.order1) + L2(out.order0));
    return out;
}

}  // namespace qjumps
