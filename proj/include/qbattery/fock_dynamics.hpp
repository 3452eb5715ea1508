// fock_dynamics.hpp — Direct numerical backend: evolve the joint
// system+bath state unitarily on the truncated Fock space and trace out the
// environment at each grid time. Serves as the brute-force oracle for the
// Gaussian backend and as the only backend for non-Gaussian initial states.

#pragma once

#include "qbattery/bath.hpp"
#include "qbattery/hilbert.hpp"

#include <vector>

namespace qb {

struct Trajectory {
    std::vector<double> times;          // strictly ascending, starts at 0
    std::vector<DensityMatrix> states;  // reduced battery states
    ModelParams params;
    std::vector<int> dims;              // truncation record (system first)
};

struct SimulateOptions {
    /// Per-mode top-level population above which the truncation is deemed
    /// unreliable; exceeding it at any grid time raises TruncationOverflow.
    double overflow_threshold = 1e-4;
    /// Total initial-ensemble weight allowed to be discarded. The initial
    /// joint state is a product of the system state with per-mode Gibbs
    /// states, expanded into pure ensemble members ordered by weight.
    double ensemble_tail = 1e-12;
    /// Joint-dimension guard; larger requests raise CapacityError.
    int dim_cap = 20000;
};

/// Reduced battery trajectory Tr_E[e^{-iHt} (rho_S(0) x rho_E) e^{+iHt}]
/// from a single eigendecomposition of the joint Hamiltonian.
Trajectory simulate_reduced(const DensityMatrix& rho_s0, const ModelParams& params,
                            const std::vector<int>& dims, const std::vector<double>& grid,
                            const SimulateOptions& options = {});

/// tr(rho^2).
double purity(const DensityMatrix& rho);

}  // namespace qb
