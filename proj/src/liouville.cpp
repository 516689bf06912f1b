#include "qjumps/liouville.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qjumps/errors.hpp"
#include "qjumps/linalg.hpp"
#include "qjumps/parallel.hpp"

namespace qjumps {

double dipole_pattern(double u) { return 3.0 * (1.0 + u * u) / 8.0; }

SuperOperator::SuperOperator(SpaceDims dims, Matrix data) : dims_(dims), data_(std::move(data)) {
    const Eigen::Index n = static_cast<Eigen::Index>(dims_.dim()) * dims_.dim();
    if (data_.rows() != n || data_.cols() != n) throw InvalidParams("superoperator shape mismatch");
}

SuperOperator SuperOperator::zero(SpaceDims dims) {
    const Eigen::Index n = static_cast<Eigen::Index>(dims.dim()) * dims.dim();
    return {dims, Matrix::Zero(n, n)};
}

SuperOperator SuperOperator::left(const QOperator& a) {
    const int d = a.dims().dim();
    return {a.dims(), linalg::kron(Matrix::Identity(d, d), a.data())};
}

SuperOperator SuperOperator::right(const QOperator& b) {
    const int d = b.dims().dim();
    return {b.dims(), linalg::kron(b.data().transpose(), Matrix::Identity(d, d))};
}

SuperOperator SuperOperator::commutator(const QOperator& h) {
    const int d = h.dims().dim();
    const Matrix id = Matrix::Identity(d, d);
    return {h.dims(), -I_UNIT * (linalg::kron(id, h.data()) - linalg::kron(h.data().transpose(), id))};
}

SuperOperator SuperOperator::sandwich(const QOperator& a) {
    return {a.dims(), linalg::kron(a.data().conjugate(), a.data())};
}

QOperator SuperOperator::apply(const QOperator& x) const {
    return {dims_, linalg::unvec(data_ * linalg::vec(x.data()), dims_.dim())};
}

SuperOperator& SuperOperator::operator+=(const SuperOperator& o) {
    data_ += o.data_;
    return *this;
}

SuperOperator operator-(SuperOperator a, const SuperOperator& b) {
    a.data_ -= b.data_;
    return a;
}

SuperOperator operator*(Complex c, SuperOperator a) {
    a.data_ *= c;
    return a;
}

QOperator build_hamiltonian(const SystemParams& p) {
    p.validate();
    const SpaceDims dims{p.n_fock};
    QuadratureExponential ex(p.n_fock);
    const Matrix a = fock_annihilation(p.n_fock);
    const Matrix id_f = Matrix::Identity(p.n_fock, p.n_fock);

    Matrix atom_id = Matrix::Identity(3, 3);
    Matrix detunings = Matrix::Zero(3, 3);
    detunings(1, 1) = p.delta1;
    detunings(2, 2) = p.delta2;
    Matrix raise1 = Matrix::Zero(3, 3);
    raise1(1, 0) = 1.0;
    Matrix couple2 = Matrix::Zero(3, 3);
    couple2(2, 0) = 1.0;
    couple2(0, 2) = 1.0;

    const Matrix kick1 = ex(p.eta1 * std::cos(p.phi1));
    const double k2 = p.eta2 * std::cos(p.phi2);
    const Matrix node2 = (ex(k2) - ex(-k2)) / (2.0 * I_UNIT);

    Matrix h = linalg::kron(atom_id, a.adjoint() * a + 0.5 * id_f);
    h += linalg::kron(detunings, id_f);
    const Matrix drive1 = 0.5 * p.omega1 * linalg::kron(raise1, kick1);
    h += drive1 + drive1.adjoint();
    h += 0.5 * p.omega2 * linalg::kron(couple2, node2);
    // remove rounding asymmetry from the exponentials
    h = 0.5 * (h + h.adjoint()).eval();
    return {dims, h};
}

SuperOperator build_dissipator(const SystemParams& p, int quad_order) {
    p.validate();
    if (quad_order < 2) throw InvalidParams("quadrature order must be at least 2");
    const SpaceDims dims{p.n_fock};
    const int d = dims.dim();
    const Matrix id = Matrix::Identity(d, d);
    QuadratureExponential ex(p.n_fock);
    const auto rule = linalg::gauss_legendre(quad_order);

    SuperOperator k = SuperOperator::zero(dims);
    const Level levels[2] = {Level::e1, Level::e2};
    const double gammas[2] = {p.gamma1, p.gamma2};
    const double etas[2] = {p.eta1, p.eta2};
    for (int j = 0; j < 2; ++j) {
        Matrix lower = Matrix::Zero(3, 3);
        lower(0, static_cast<int>(levels[j])) = 1.0;
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double u = rule.nodes[q];
            const double w = rule.weights[q] * dipole_pattern(u);
            const Matrix jump = linalg::kron(lower, ex(-etas[j] * u));
            k.data() += (gammas[j] * w) * linalg::kron(jump.conjugate(), jump);
        }
        const Matrix proj = atomic(dims, levels[j], levels[j]).data();
        k.data() -= 0.5 * gammas[j] * (linalg::kron(id, proj) + linalg::kron(proj.transpose(), id));
    }
    return k;
}

SuperOperator build_liouvillian(const SystemParams& p, int quad_order) {
    return SuperOperator::commutator(build_hamiltonian(p)) + build_dissipator(p, quad_order);
}

QOperator steady_state(const SuperOperator& L) {
    const int d = L.dims().dim();
    Matrix m = L.data();
    m.row(0) = linalg::vec(Matrix::Identity(d, d)).transpose();
    Vector rhs = Vector::Zero(m.rows());
    rhs(0) = 1.0;
    const auto sol = linalg::lu_solve(std::move(m), rhs);
    // With the trace row in place the system is regular exactly when the null
    // space of L is one-dimensional.
    if (!(sol.rcond > 1e-12))
        throw NonUniqueSteadyState("stationary state is not unique (rcond " + std::to_string(sol.rcond) + ")");
    Matrix rho = linalg::unvec(sol.x, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace();
    return {L.dims(), rho};
}

QOperator SpectralDecomposition::right(std::size_t i) const {
    return {dims_, linalg::unvec(right_.col(static_cast<Eigen::Index>(i)), dims_.dim())};
}

QOperator SpectralDecomposition::left(std::size_t i) const {
    // Tr{L X} = vec(Lᵀ) · vec(X)
    const Vector row = dual_.row(static_cast<Eigen::Index>(i)).transpose();
    return {dims_, linalg::unvec(row, dims_.dim()).transpose()};
}

Vector SpectralDecomposition::coefficients(const QOperator& x) const { return dual_ * linalg::vec(x.data()); }

QOperator SpectralDecomposition::reconstruct(const Vector& c) const {
    return {dims_, linalg::unvec(right_ * c, dims_.dim())};
}

QOperator SpectralDecomposition::propagate(const QOperator& x, double t) const {
    Vector c = coefficients(x);
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(values_(i) * t);
    return reconstruct(c);
}

std::size_t SpectralDecomposition::stationary_index() const {
    Eigen::Index idx = 0;
    values_.cwiseAbs().minCoeff(&idx);
    return static_cast<std::size_t>(idx);
}

SpectralDecomposition spectral_decomposition(const SuperOperator& L) {
    auto pairs = linalg::eig_general(L.data());
    SpectralDecomposition out(L.dims());
    out.worst_condition_ = linalg::min_pair_condition(pairs);
    if (out.worst_condition_ < 1e-8)
        throw NearDefective("eigenbasis nearly defective: pair overlap " + std::to_string(out.worst_condition_));
    out.values_ = std::move(pairs.values);
    out.right_ = std::move(pairs.right);
    out.dual_ = std::move(pairs.dual);
    return out;
}

SpectrumResult correlation_spectrum(const SpectralDecomposition& decomposition, const QOperator& dipole,
                                    const QOperator& rho_st, const std::vector<double>& grid) {
    const std::size_t n = decomposition.size();
    const QOperator driven = dipole * rho_st;
    const Vector c = decomposition.coefficients(driven);
    const QOperator dag = dipole.adjoint();
    const std::size_t zero = decomposition.stationary_index();

    SpectrumResult out;
    out.order = "exact";
    out.grid = grid;
    out.lines.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (c(static_cast<Eigen::Index>(i)) == Complex(0.0)) continue;
        const Complex weight = dag.trace_with(decomposition.right(i)) * c(static_cast<Eigen::Index>(i));
        SpectralLine line{decomposition.eigenvalues()(static_cast<Eigen::Index>(i)), weight,
                          i == zero ? "elastic" : component::inelastic};
        if (i == zero) out.elastic_weight = weight.real();
        out.lines.push_back(line);
    }
    out.render();
    return out;
}

std::vector<double> SpectrumResult::component_or_zero(const std::string& name) const {
    auto it = components.find(name);
    if (it == components.end()) return std::vector<double>(grid.size(), 0.0);
    return it->second;
}

Complex SpectrumResult::component_weight(const std::string& name) const {
    Complex sum = 0.0;
    for (const auto& l : lines)
        if (l.component == name) sum += l.weight;
    return sum;
}

void SpectrumResult::render() {
    total.assign(grid.size(), 0.0);
    for (auto& [name, curve] : components) curve.assign(grid.size(), 0.0);
    for (const auto& l : lines) {
        if (l.component == "elastic") continue;
        auto& curve = components[l.component];
        curve.resize(grid.size(), 0.0);
    }
    parallel_for(grid.size(), [&](std::size_t g) {
        for (const auto& l : lines) {
            if (l.component == "elastic") continue;
            const double v = line_shape(l, grid[g]);
            components.at(l.component)[g] += v;
            total[g] += v;
        }
    });
}

}  // namespace qjumps
