// hilbert.hpp — Operator algebra on truncated multi-mode Fock spaces:
// ladder/quadrature operators, tensor products, partial trace, Hermitian
// eigensolves, unitary evolution and trace distance.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace qb {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Thrown when a Fock truncation becomes unreliable (top-level population
/// above the configured threshold).
struct TruncationOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a requested joint Fock dimension exceeds the configured cap.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline int total_dim(const std::vector<int>& dims) {
    long long d = 1;
    for (int dk : dims) d *= dk;
    return static_cast<int>(d);
}

/// Dense operator on a truncated Fock space. dims lists the per-mode
/// truncation; mat has side prod(dims).
struct TruncatedOperator {
    std::vector<int> dims;
    CMatrix mat;

    int dim() const { return static_cast<int>(mat.rows()); }
};

/// A state: same layout as TruncatedOperator, restricted to Hermitian,
/// unit-trace, positive-semidefinite matrices (see validate_density).
struct DensityMatrix {
    std::vector<int> dims;
    CMatrix mat;

    int dim() const { return static_cast<int>(mat.rows()); }
};

TruncatedOperator make_operator(std::vector<int> dims, CMatrix mat);

/// Entrywise Hermiticity check, max |A - A^dag| <= tol.
bool is_hermitian(const CMatrix& mat, double tol = 1e-12);

/// Throws std::invalid_argument unless rho is Hermitian (1e-12), unit trace
/// (1e-10) and has min eigenvalue >= -1e-10.
void validate_density(const DensityMatrix& rho);

/// Annihilation operator, <n-1|a|n> = sqrt(n).
TruncatedOperator destroy(int dim);

/// Number operator a^dag a.
TruncatedOperator number_op(int dim);

/// Position/momentum pair q = (a + a^dag)/sqrt(2 m w), p = i sqrt(m w / 2) (a^dag - a).
std::pair<TruncatedOperator, TruncatedOperator> quadratures(int dim, double mass, double omega);

/// Identity on a given truncation.
TruncatedOperator identity_op(int dim);

/// Kronecker product of the factors in the given mode order; dims concatenate.
TruncatedOperator tensor(const std::vector<TruncatedOperator>& factors);

/// Reduced state over the kept modes (indices into rho.dims, ascending).
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

struct EigSystem {
    RVector values;   // ascending
    CMatrix vectors;  // orthonormal columns
};

/// Hermitian eigendecomposition, values ascending. Throws on non-Hermitian
/// input. Uses LAPACK zheevd above a size threshold, Eigen below it.
EigSystem herm_eig(const CMatrix& mat);
EigSystem herm_eig(const TruncatedOperator& op);

/// Caches one eigendecomposition of H and applies exp(-iHt) rho exp(+iHt)
/// for any number of times.
class UnitaryEvolver {
  public:
    explicit UnitaryEvolver(const TruncatedOperator& hamiltonian);

    DensityMatrix evolve(const DensityMatrix& rho0, double t) const;
    CVector evolve_vector(const CVector& psi0, double t) const;

    const EigSystem& eig() const { return eig_; }
    const std::vector<int>& dims() const { return dims_; }

  private:
    EigSystem eig_;
    std::vector<int> dims_;
};

/// One-shot convenience over UnitaryEvolver.
DensityMatrix evolve_unitary(const TruncatedOperator& hamiltonian, const DensityMatrix& rho0,
                             double t);

/// D(rho1, rho2) = 1/2 tr |rho1 - rho2|, in [0, 1].
double trace_distance(const DensityMatrix& rho1, const DensityMatrix& rho2);

// --- basis states -----------------------------------------------------------

/// Truncated coherent-state amplitudes alpha^n / sqrt(n!), renormalized.
CVector coherent_amplitudes(int dim, Complex alpha);

DensityMatrix pure_state(std::vector<int> dims, const CVector& amplitudes);
DensityMatrix number_state(int dim, int n);
DensityMatrix coherent_state(int dim, Complex alpha);
/// c0|0> + c1|1>, normalized, embedded in the given truncation.
DensityMatrix superposition_state(int dim, Complex c0, Complex c1);

}  // namespace qb
