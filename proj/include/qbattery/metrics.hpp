// metrics.hpp — Work-extraction diagnostics of the battery state: ergotropy
// via the passive state, its incoherent/coherent split, l1 coherence,
// instantaneous and average charging power.

#pragma once

#include "qbattery/hilbert.hpp"

#include <vector>

namespace qb {

/// Spectral data pairing the j-th largest population with the j-th smallest
/// energy level.
struct PassiveDecomposition {
    RVector populations;       // descending, clipped and renormalized
    RVector energies;          // ascending
    CMatrix extraction;        // U = sum_j |eps_j><r_j|
    DensityMatrix passive;     // sum_j r_j |eps_j><eps_j|
};

/// Hamiltonian together with its cached eigensystem; metric calls reuse it
/// across a trajectory.
struct SystemHamiltonian {
    TruncatedOperator op;
    EigSystem eig;
};

SystemHamiltonian prepare_hamiltonian(const TruncatedOperator& h);

/// Free-oscillator battery Hamiltonian omega (n + 1/2) on a given truncation.
SystemHamiltonian battery_hamiltonian(double omega, int dim);

PassiveDecomposition passive_state(const DensityMatrix& rho, const SystemHamiltonian& h);
PassiveDecomposition passive_state(const DensityMatrix& rho, const TruncatedOperator& h);

/// Maximum unitarily extractable work, tr(rho H) - tr(rho_passive H).
/// Cross-checked internally against the equivalent double-sum expression.
double ergotropy(const DensityMatrix& rho, const SystemHamiltonian& h);
double ergotropy(const DensityMatrix& rho, const TruncatedOperator& h);

/// Ergotropy of the state dephased in the energy eigenbasis.
double incoherent_ergotropy(const DensityMatrix& rho, const SystemHamiltonian& h);
double incoherent_ergotropy(const DensityMatrix& rho, const TruncatedOperator& h);

/// W - W_i, the part stored exclusively in energy-basis coherences.
double coherent_ergotropy(const DensityMatrix& rho, const SystemHamiltonian& h);
double coherent_ergotropy(const DensityMatrix& rho, const TruncatedOperator& h);

/// Sum of absolute off-diagonal entries (state given in the energy eigenbasis).
double l1_coherence(const DensityMatrix& rho);

/// dW/dt by second-order finite differences on a uniform grid.
std::vector<double> instantaneous_power(const std::vector<double>& work,
                                        const std::vector<double>& times);

/// (W(t1) - W(t0)) / (t1 - t0).
double average_power(const std::vector<double>& work, const std::vector<double>& times,
                     int t0_index, int t_index);

/// Charging cycles (index of a local minimum of W, index of the next local
/// maximum), detected from sign changes of dW/dt with a noise floor.
std::vector<std::pair<int, int>> detect_charging_cycles(const std::vector<double>& work,
                                                        const std::vector<double>& times,
                                                        double noise_floor = 1e-8);

/// Dimensionless first and second moments (x, y) of a single-mode state.
void quadrature_moments(const DensityMatrix& rho, Eigen::Vector2d& mean, Eigen::Matrix2d& cov);

/// Per-time-point thermodynamic record of a battery trajectory.
struct ErgotropyReport {
    std::vector<double> times;
    std::vector<double> energy;       // tr(rho H)
    std::vector<double> work;         // W
    std::vector<double> work_incoh;   // W_i
    std::vector<double> work_coh;     // W_c
    std::vector<double> coherence;    // C_l1
    std::vector<double> power;        // dW/dt
    std::vector<double> avg_power;    // (W(t) - W(0)) / t, 0 at t = 0
    std::vector<double> nu;           // symplectic eigenvalue of the reduced state
    std::vector<double> purity;       // tr(rho^2)
};

ErgotropyReport build_report(const std::vector<double>& times,
                             const std::vector<DensityMatrix>& states, double omega_s);

}  // namespace qb
