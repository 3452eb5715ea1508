// bath.hpp — Physical model assembly: Ohmic spectral density, linear bath
// discretization, the full Fock-space Hamiltonian of an oscillator coupled to
// N bath modes through position and momentum, the same Hamiltonian as a
// quadratic form over quadratures, and thermal environment states.
//
// Conventions (hbar = k_B = 1): bath masses are fixed to 1. Dimensionless
// quadratures x = sqrt(m w) q, y = p / sqrt(m w) per mode, so each free
// oscillator reads (w/2)(x^2 + y^2). Covariances use
// sigma_jk = 1/2 <{R_j - <R_j>, R_k - <R_k>}> with vacuum sigma = I/2.
// Conversions between physical and dimensionless quadratures stay inside this
// module.

#pragma once

#include "qbattery/hilbert.hpp"

#include <vector>

namespace qb {

/// System-bath coupling operator family.
///   SubtractiveMu:  q - mu p          (mu >= 0)
///   ConvexMuTilde:  (1 - mu) q + mu p (mu in [0, 1])
enum class CouplingForm { SubtractiveMu, ConvexMuTilde };

struct BathSpec {
    int n_modes = 6;
    double eta = 0.1;        // dimensionless coupling strength
    double cutoff = 5.0;     // exponential cutoff frequency
    double omega_max = 10.0; // discretization ceiling
};

struct ModelParams {
    double mass = 1.5;
    double omega_s = 1.0;
    CouplingForm form = CouplingForm::SubtractiveMu;
    double coupling = 0.0;  // mu or mu-tilde depending on form
    double temperature = 1.0;
    BathSpec bath;
};

/// Throws std::invalid_argument on out-of-range parameters.
void validate(const ModelParams& params);

/// H = 1/2 R^T M R over the physical quadrature vector (q, p, q_1, p_1, ...).
struct QuadraticForm {
    RMatrix mat;

    int n_modes() const { return static_cast<int>(mat.rows()) / 2 - 1; }
};

struct BathDiscretization {
    std::vector<double> omegas;     // w_n = n * domega
    std::vector<double> couplings;  // c_n
};

/// Ohmic spectral density with exponential cutoff, J(w) = eta w exp(-w / cutoff).
double spectral_density(double omega, const BathSpec& spec);

/// Linear grid w_n = n domega, domega = omega_max / N, with weights
/// c_n^2 = (2/pi) J(w_n) w_n domega.
BathDiscretization discretize_bath(const BathSpec& spec);

/// Position/momentum weights (w_q, w_p) of the system coupling operator.
std::pair<double, double> coupling_weights(const ModelParams& params);

/// w_q q + w_p p on the system mode.
TruncatedOperator coupling_operator(const ModelParams& params, int dim);

/// Full Hamiltonian on the joint truncated Fock space. dims lists the system
/// truncation followed by one entry per bath mode.
TruncatedOperator build_total_hamiltonian(const ModelParams& params, const std::vector<int>& dims);

/// Quadratic form over physical quadratures (q, p, q_1, p_1, ..., q_N, p_N).
QuadraticForm quadratic_form(const ModelParams& params);

/// Same Hamiltonian over dimensionless quadratures (x, y, x_1, y_1, ...).
QuadraticForm dimensionless_form(const ModelParams& params);

/// Diagonal scaling Lambda with R_physical = Lambda R_dimensionless.
RVector physical_scaling(const ModelParams& params);

/// Mean thermal occupation 1 / (exp(w/T) - 1); zero at T = 0.
double bose_occupation(double omega, double temperature);

/// Truncated Gibbs state of a free mode, renormalized; ground state at T = 0.
DensityMatrix thermal_state_fock(double omega, double temperature, int dim);

/// Thermal covariance diag(nu, nu) with nu = 1/2 coth(w / 2T) in the
/// dimensionless convention; vacuum I/2 at T = 0.
Eigen::Matrix2d thermal_covariance(double omega, double temperature);

/// Smallest dimension whose thermal top-level population drops below tail,
/// clamped to [min_dim, max_dim].
int thermal_dim_for_tail(double omega, double temperature, double tail, int min_dim = 3,
                         int max_dim = 64);

}  // namespace qb
