#include "qbattery/hilbert.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qb {

namespace {

// Eigen handles small problems with less overhead; LAPACK zheevd wins above this.
constexpr int kLapackThreshold = 128;

}  // namespace

TruncatedOperator make_operator(std::vector<int> dims, CMatrix mat) {
    const int d = total_dim(dims);
    if (mat.rows() != d || mat.cols() != d)
        throw std::invalid_argument("make_operator: matrix side " + std::to_string(mat.rows()) +
                                    " does not match mode dimensions (product " +
                                    std::to_string(d) + ")");
    return TruncatedOperator{std::move(dims), std::move(mat)};
}

bool is_hermitian(const CMatrix& mat, double tol) {
    if (mat.rows() != mat.cols()) return false;
    return (mat - mat.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

void validate_density(const DensityMatrix& rho) {
    if (rho.mat.rows() != rho.mat.cols())
        throw std::invalid_argument("density matrix must be square");
    if (rho.mat.rows() != total_dim(rho.dims))
        throw std::invalid_argument("density matrix side does not match mode dimensions");
    if (!is_hermitian(rho.mat, 1e-12)) throw std::invalid_argument("density matrix not Hermitian");
    const double tr = rho.mat.trace().real();
    if (std::abs(tr - 1.0) > 1e-10)
        throw std::invalid_argument("density matrix trace " + std::to_string(tr) + " != 1");
    const auto es = herm_eig(rho.mat);
    if (es.values.minCoeff() < -1e-10)
        throw std::invalid_argument("density matrix has eigenvalue " +
                                    std::to_string(es.values.minCoeff()) + " < -1e-10");
}

TruncatedOperator destroy(int dim) {
    if (dim < 2) throw std::invalid_argument("destroy: dim must be >= 2");
    CMatrix a = CMatrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return {{dim}, std::move(a)};
}

TruncatedOperator number_op(int dim) {
    if (dim < 2) throw std::invalid_argument("number_op: dim must be >= 2");
    CMatrix n = CMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return {{dim}, std::move(n)};
}

TruncatedOperator identity_op(int dim) {
    if (dim < 1) throw std::invalid_argument("identity_op: dim must be >= 1");
    return {{dim}, CMatrix::Identity(dim, dim)};
}

std::pair<TruncatedOperator, TruncatedOperator> quadratures(int dim, double mass, double omega) {
    if (mass <= 0.0 || omega <= 0.0)
        throw std::invalid_argument("quadratures: mass and omega must be positive");
    const TruncatedOperator a = destroy(dim);
    const CMatrix adag = a.mat.adjoint();
    const Complex i(0.0, 1.0);
    CMatrix q = (a.mat + adag) / std::sqrt(2.0 * mass * omega);
    CMatrix p = i * std::sqrt(mass * omega / 2.0) * (adag - a.mat);
    return {TruncatedOperator{{dim}, std::move(q)}, TruncatedOperator{{dim}, std::move(p)}};
}

TruncatedOperator tensor(const std::vector<TruncatedOperator>& factors) {
    if (factors.empty()) throw std::invalid_argument("tensor: need at least one factor");
    CMatrix acc = factors[0].mat;
    std::vector<int> dims = factors[0].dims;
    for (size_t f = 1; f < factors.size(); ++f) {
        const CMatrix& b = factors[f].mat;
        CMatrix out(acc.rows() * b.rows(), acc.cols() * b.cols());
        for (Eigen::Index i = 0; i < acc.rows(); ++i)
            for (Eigen::Index j = 0; j < acc.cols(); ++j)
                out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = acc(i, j) * b;
        acc = std::move(out);
        dims.insert(dims.end(), factors[f].dims.begin(), factors[f].dims.end());
    }
    return {std::move(dims), std::move(acc)};
}

namespace {

// Flat offsets of every digit combination of the selected modes inside the
// full Kronecker index. The first listed mode varies fastest.
std::vector<long long> subspace_offsets(const std::vector<int>& dims,
                                        const std::vector<int>& modes) {
    std::vector<long long> strides(dims.size());
    long long s = 1;
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        strides[k] = s;
        s *= dims[k];
    }
    long long sub = 1;
    for (int m : modes) sub *= dims[m];
    std::vector<long long> offsets(sub, 0);
    long long repeat = 1;
    for (int m : modes) {
        for (long long idx = 0; idx < sub; ++idx) {
            const long long digit = (idx / repeat) % dims[m];
            offsets[idx] += digit * strides[m];
        }
        repeat *= dims[m];
    }
    return offsets;
}

}  // namespace

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
    const int n_modes = static_cast<int>(rho.dims.size());
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
    std::vector<int> kept = keep;
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
        throw std::out_of_range("partial_trace: duplicate mode index");
    for (int m : kept)
        if (m < 0 || m >= n_modes) throw std::out_of_range("partial_trace: mode index out of range");

    std::vector<int> traced;
    for (int m = 0; m < n_modes; ++m)
        if (!std::binary_search(kept.begin(), kept.end(), m)) traced.push_back(m);

    std::vector<int> kept_dims;
    for (int m : kept) kept_dims.push_back(rho.dims[m]);
    const int dk = total_dim(kept_dims);

    if (traced.empty()) return DensityMatrix{kept_dims, rho.mat};

    // Enumerate kept/traced sub-indices via their flat offsets. The kept
    // enumeration must walk digits with the first listed mode slowest, so
    // reverse the little-endian enumeration used in subspace_offsets.
    auto offsets_for = [&](const std::vector<int>& modes) {
        std::vector<int> rev(modes.rbegin(), modes.rend());
        return subspace_offsets(rho.dims, rev);
    };
    const std::vector<long long> keep_off = offsets_for(kept);
    const std::vector<long long> trace_off = offsets_for(traced);

    CMatrix out = CMatrix::Zero(dk, dk);
    for (int a = 0; a < dk; ++a)
        for (int b = 0; b < dk; ++b) {
            Complex s(0.0, 0.0);
            for (long long e : trace_off) s += rho.mat(keep_off[a] + e, keep_off[b] + e);
            out(a, b) = s;
        }
    return DensityMatrix{kept_dims, std::move(out)};
}

EigSystem herm_eig(const CMatrix& mat) {
    if (mat.rows() != mat.cols()) throw std::invalid_argument("herm_eig: matrix must be square");
    const double scale = std::max(1.0, mat.cwiseAbs().maxCoeff());
    if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("herm_eig: matrix is not Hermitian");

    const int n = static_cast<int>(mat.rows());
    CMatrix work = (mat + mat.adjoint()) / 2.0;

    if (n < kLapackThreshold) {
        Eigen::SelfAdjointEigenSolver<CMatrix> solver(work);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("herm_eig: Eigen solver failed to converge");
        return {solver.eigenvalues(), solver.eigenvectors()};
    }

    RVector values(n);
    const int info =
        LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                       reinterpret_cast<lapack_complex_double*>(work.data()), n, values.data());
    if (info != 0)
        throw std::runtime_error("herm_eig: LAPACK zheevd failed, info=" + std::to_string(info));
    return {std::move(values), std::move(work)};
}

EigSystem herm_eig(const TruncatedOperator& op) { return herm_eig(op.mat); }

UnitaryEvolver::UnitaryEvolver(const TruncatedOperator& hamiltonian)
    : eig_(herm_eig(hamiltonian.mat)), dims_(hamiltonian.dims) {}

DensityMatrix UnitaryEvolver::evolve(const DensityMatrix& rho0, double t) const {
    if (rho0.mat.rows() != eig_.vectors.rows())
        throw std::invalid_argument("evolve: state dimension does not match Hamiltonian");
    const Eigen::Index n = eig_.vectors.rows();
    CVector phases(n);
    for (Eigen::Index j = 0; j < n; ++j)
        phases(j) = std::exp(Complex(0.0, -eig_.values(j) * t));
    const CMatrix u = eig_.vectors * phases.asDiagonal() * eig_.vectors.adjoint();
    CMatrix evolved = u * rho0.mat * u.adjoint();
    return DensityMatrix{rho0.dims, std::move(evolved)};
}

CVector UnitaryEvolver::evolve_vector(const CVector& psi0, double t) const {
    if (psi0.size() != eig_.vectors.rows())
        throw std::invalid_argument("evolve_vector: dimension mismatch");
    const Eigen::Index n = eig_.vectors.rows();
    CVector coeff = eig_.vectors.adjoint() * psi0;
    for (Eigen::Index j = 0; j < n; ++j)
        coeff(j) *= std::exp(Complex(0.0, -eig_.values(j) * t));
    return eig_.vectors * coeff;
}

DensityMatrix evolve_unitary(const TruncatedOperator& hamiltonian, const DensityMatrix& rho0,
                             double t) {
    return UnitaryEvolver(hamiltonian).evolve(rho0, t);
}

double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2) {
    if (rho1.mat.rows() != rho2.mat.rows())
        throw std::invalid_argument("trace_distance: dimension mismatch");
    const CMatrix diff = rho1.mat - rho2.mat;
    const auto es = herm_eig(diff);
    return 0.5 * es.values.cwiseAbs().sum();
}

CVector coherent_amplitudes(int dim, Complex alpha) {
    if (dim < 2) throw std::invalid_argument("coherent_amplitudes: dim must be >= 2");
    CVector amps(dim);
    amps(0) = 1.0;
    for (int n = 1; n < dim; ++n) amps(n) = amps(n - 1) * alpha / std::sqrt(double(n));
    amps /= amps.norm();
    return amps;
}

DensityMatrix pure_state(std::vector<int> dims, const CVector& amplitudes) {
    if (amplitudes.size() != total_dim(dims))
        throw std::invalid_argument("pure_state: amplitude length does not match dims");
    CVector psi = amplitudes / amplitudes.norm();
    return DensityMatrix{std::move(dims), psi * psi.adjoint()};
}

DensityMatrix number_state(int dim, int n) {
    if (n < 0 || n >= dim) throw std::invalid_argument("number_state: level out of range");
    CVector psi = CVector::Zero(dim);
    psi(n) = 1.0;
    return pure_state({dim}, psi);
}

DensityMatrix coherent_state(int dim, Complex alpha) {
    return pure_state({dim}, coherent_amplitudes(dim, alpha));
}

DensityMatrix superposition_state(int dim, Complex c0, Complex c1) {
    if (dim < 2) throw std::invalid_argument("superposition_state: dim must be >= 2");
    CVector psi = CVector::Zero(dim);
    psi(0) = c0;
    psi(1) = c1;
    const double norm = psi.norm();
    if (norm == 0.0) throw std::invalid_argument("superposition_state: zero amplitudes");
    return pure_state({dim}, psi);
}

}  // namespace qb
