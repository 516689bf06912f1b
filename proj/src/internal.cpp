#include "qjumps/internal.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qjumps/errors.hpp"
#include "qjumps/linalg.hpp"

namespace qjumps {

namespace {

Matrix unit(int i, int j) {
    Matrix m = Matrix::Zero(3, 3);
    m(i, j) = 1.0;
    return m;
}

Matrix internal_hamiltonian(const SystemParams& p) {
    Matrix h = Matrix::Zero(3, 3);
    h(1, 1) = p.delta1;
    h(2, 2) = p.delta2;
    h(1, 0) = h(0, 1) = 0.5 * p.omega1;
    return h;
}

// Left element L with Tr{L X} = row · vec(X).
Matrix left_from_row(const Vector& row) { return linalg::unvec(row, 3).transpose(); }

}  // namespace

std::string to_string(InternalMode m) {
    switch (m) {
        case InternalMode::steady: return "steady";
        case InternalMode::tls_zero: return "tls_0";
        case InternalMode::tls_plus: return "tls_+";
        case InternalMode::tls_minus: return "tls_-";
        case InternalMode::decay: return "decay";
        case InternalMode::one_plus: return "1+";
        case InternalMode::one_minus: return "1-";
        case InternalMode::two_plus: return "2+";
        case InternalMode::two_minus: return "2-";
    }
    return "?";
}

Matrix internal_liouvillian(const SystemParams& p) {
    const Matrix id = Matrix::Identity(3, 3);
    const Matrix h = internal_hamiltonian(p);
    Matrix l = -I_UNIT * (linalg::kron(id, h) - linalg::kron(h.transpose(), id));
    const double gammas[2] = {p.gamma1, p.gamma2};
    for (int j = 1; j <= 2; ++j) {
        const Matrix lower = unit(0, j);
        const Matrix proj = unit(j, j);
        l += 0.5 * gammas[j - 1] *
             (2.0 * linalg::kron(lower.conjugate(), lower) - linalg::kron(id, proj) - linalg::kron(proj.transpose(), id));
    }
    return l;
}

Matrix internal_effective_hamiltonian(const SystemParams& p) {
    Matrix h = internal_hamiltonian(p);
    h(1, 1) -= 0.5 * I_UNIT * p.gamma1;
    h(2, 2) -= 0.5 * I_UNIT * p.gamma2;
    return h;
}

std::pair<Complex, Complex> dressed_frequencies(const SystemParams& p) {
    const Complex z(p.delta1, -0.5 * p.gamma1);
    // z * sqrt(1 + Ω²/z²) is continuous in Ω from Ω = 0, where it equals z.
    const Complex root = z * std::sqrt(1.0 + p.omega1 * p.omega1 / (z * z));
    return {0.5 * (z + root), 0.5 * (z - root)};
}

double saturation(const SystemParams& p) {
    return 0.5 * p.omega1 * p.omega1 / (p.delta1 * p.delta1 + 0.25 * p.gamma1 * p.gamma1);
}

InternalSteadyState internal_steady_state(const SystemParams& p) {
    const double o2 = p.omega1 * p.omega1;
    const double n = p.gamma1 * p.gamma1 + 4.0 * p.delta1 * p.delta1 + 2.0 * o2;
    Matrix rho = Matrix::Zero(3, 3);
    rho(1, 1) = o2 / n;
    rho(0, 0) = (n - o2) / n;
    rho(1, 0) = -p.omega1 * Complex(2.0 * p.delta1, p.gamma1) / n;
    rho(0, 1) = std::conj(rho(1, 0));
    return {rho, n};
}

Matrix InternalEigensystem::right_matrix() const {
    Matrix r(9, kInternalModes);
    for (int k = 0; k < kInternalModes; ++k) r.col(k) = linalg::vec(modes[k].right);
    return r;
}

Matrix InternalEigensystem::dual_matrix() const {
    Matrix d(kInternalModes, 9);
    for (int k = 0; k < kInternalModes; ++k) d.row(k) = linalg::vec(modes[k].left.transpose()).transpose();
    return d;
}

InternalEigensystem internal_eigensystem(const SystemParams& p) {
    if (std::abs(p.gamma1 - 2.0 * p.gamma2) < 1e-12 * p.gamma1)
        throw DegenerateInternal("gamma1 = 2 gamma2 makes the decay eigen-element singular");

    InternalEigensystem es;
    std::tie(es.omega_plus, es.omega_minus) = dressed_frequencies(p);
    es.omega_2 = Complex(p.delta2, -0.5 * p.gamma2);

    auto dressed = [&](Complex w) {
        Vector v = Vector::Zero(3);
        if (p.omega1 == 0.0) {
            // uncoupled limit: ω+ belongs to |1>, ω- to |g>
            v(w == Complex(0.0) ? 0 : 1) = 1.0;
            return v;
        }
        v(0) = 0.5 * p.omega1;
        v(1) = w;
        return Vector(v / std::sqrt(w * w + 0.25 * p.omega1 * p.omega1));
    };
    es.ket_plus = dressed(es.omega_plus);
    es.ket_minus = dressed(es.omega_minus);
    es.dual_plus = es.ket_plus;
    es.dual_minus = es.ket_minus;

    Vector e2 = Vector::Zero(3);
    e2(2) = 1.0;

    auto set = [&](InternalMode m, Complex lambda, Matrix right, Matrix left) {
        es.modes[static_cast<int>(m)] = {m, lambda, std::move(right), std::move(left)};
    };

    set(InternalMode::steady, 0.0, internal_steady_state(p).rho, Matrix::Identity(3, 3));

    es.upsilon = (p.gamma1 - p.gamma2) / (p.gamma1 - 2.0 * p.gamma2);
    es.varsigma = p.omega1 / Complex(2.0 * p.delta1, p.gamma1 - 2.0 * p.gamma2);
    {
        const double vs2 = std::norm(es.varsigma);
        const double c = 1.0 / (es.upsilon + 2.0 * vs2);
        Matrix r = unit(2, 2);
        r(1, 1) -= c * vs2;
        r(0, 0) -= c * (es.upsilon + vs2);
        r(1, 0) += c * es.upsilon * std::conj(es.varsigma);
        r(0, 1) += c * es.upsilon * es.varsigma;
        set(InternalMode::decay, -p.gamma2, r, unit(2, 2));
    }

    const std::pair<InternalMode, InternalMode> transition_labels[2] = {
        {InternalMode::one_plus, InternalMode::two_plus}, {InternalMode::one_minus, InternalMode::two_minus}};
    const Complex omegas[2] = {es.omega_plus, es.omega_minus};
    const Vector* kets[2] = {&es.ket_plus, &es.ket_minus};
    const Vector* duals[2] = {&es.dual_plus, &es.dual_minus};
    for (int s = 0; s < 2; ++s) {
        const Vector& ket = *kets[s];
        const Vector& dual = *duals[s];
        // |σ><2| at (ω_σ - ω2*)/i, paired with |2><σ̃|
        set(transition_labels[s].first, (omegas[s] - std::conj(es.omega_2)) / I_UNIT, ket * e2.adjoint(),
            e2 * dual.transpose());
        // |2><σ| at (ω2 - ω_σ*)/i, paired with the conjugate of |σ̃><2|
        set(transition_labels[s].second, (es.omega_2 - std::conj(omegas[s])) / I_UNIT, e2 * ket.adjoint(),
            dual.conjugate() * e2.transpose());
    }

    // Two-level block spanned by |g><g|, |1><g|, |g><1|, |1><1|.
    const int block[4] = {0, 1, 3, 4};
    const Matrix full = internal_liouvillian(p);
    Matrix sub(4, 4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) sub(a, b) = full(block[a], block[b]);
    Eigen::ComplexEigenSolver<Matrix> ces(sub);
    const Matrix vecs = ces.eigenvectors();
    const Matrix inv = vecs.inverse();
    std::vector<int> order;
    {
        Eigen::Index zero = 0;
        ces.eigenvalues().cwiseAbs().minCoeff(&zero);
        for (int k = 0; k < 4; ++k)
            if (k != zero) order.push_back(k);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return ces.eigenvalues()(a).imag() < ces.eigenvalues()(b).imag(); });
    }
    const InternalMode tls_labels[3] = {InternalMode::tls_minus, InternalMode::tls_zero, InternalMode::tls_plus};
    for (int t = 0; t < 3; ++t) {
        const int k = order[t];
        const Complex lambda = ces.eigenvalues()(k);
        Vector r = Vector::Zero(9), row = Vector::Zero(9);
        for (int a = 0; a < 4; ++a) {
            r(block[a]) = vecs(a, k);
            row(block[a]) = inv(k, a);
        }
        // |2><2| decays into |g><g|, so the left element picks up a |2><2| part.
        row(8) = p.gamma2 * row(0) / (lambda + p.gamma2);
        set(tls_labels[t], lambda, linalg::unvec(r, 3), left_from_row(row));
    }

    for (int a = 0; a < kInternalModes; ++a)
        for (int b = a + 1; b < kInternalModes; ++b)
            if (std::abs(es.modes[a].lambda - es.modes[b].lambda) < 1e-8)
                throw DegenerateInternal("internal eigenvalues " + to_string(es.modes[a].label) + " and " +
                                         to_string(es.modes[b].label) + " coincide");
    return es;
}

}  // namespace qjumps
