// gaussian.hpp — Exact Gaussian fast path. Quadratic Hamiltonians keep
// Gaussian states Gaussian, so (mean, covariance) evolve symplectically for
// hundreds of bath modes; the reduced system block converts to a truncated
// Fock density matrix when matrix-valued metrics are needed.
//
// All moments use the dimensionless quadrature convention of bath.hpp,
// mode order (x, y, x_1, y_1, ..., x_N, y_N), vacuum covariance I/2.

#pragma once

#include "qbattery/bath.hpp"
#include "qbattery/hilbert.hpp"

#include <memory>
#include <vector>

namespace qb {

struct GaussianState {
    RVector mean;
    RMatrix cov;

    int n_pairs() const { return static_cast<int>(mean.size()) / 2; }
};

struct SymplecticPropagator {
    RMatrix s;  // S = exp(Omega M t), S Omega S^T = Omega
};

/// Standard symplectic form, direct sum of [[0, 1], [-1, 0]] blocks.
RMatrix symplectic_form(int n_pairs);

/// Propagates Gaussian moments under a fixed quadratic form. One spectral
/// decomposition of Omega M serves every time point; a dense matrix
/// exponential backs it up when the spectral route is unreliable.
class GaussianEvolver {
  public:
    explicit GaussianEvolver(const QuadraticForm& form);

    int side() const { return side_; }
    bool spectral() const { return spectral_ok_; }

    /// Full propagator at time t; symplecticity is checked, not assumed.
    SymplecticPropagator propagator(double t) const;

    /// Reduced system moments of a fixed initial state at arbitrary times,
    /// O(side^2) per time point on the spectral route.
    class Propagated {
      public:
        void reduced(double t, Eigen::Vector2d& mean2, Eigen::Matrix2d& cov2) const;

      private:
        friend class GaussianEvolver;
        const GaussianEvolver* evolver_ = nullptr;
        CMatrix k_;        // P^{-1} cov P^{-T}
        CVector w_;        // P^{-1} mean
        GaussianState g0_; // kept for the fallback route
    };

    Propagated prepare(const GaussianState& g0) const;

  private:
    int side_;
    RMatrix a_;  // Omega M
    bool spectral_ok_ = false;
    CMatrix p_, q_;  // A = P diag(gamma) Q with Q = P^{-1}
    CVector gamma_;
};

/// mean <- S mean, cov <- S cov S^T.
GaussianState evolve_gaussian(const GaussianState& g, const SymplecticPropagator& s);

/// Gaussian marginal of the system mode: the leading 2x2 block.
void reduce_to_system(const GaussianState& g, Eigen::Vector2d& mean2, Eigen::Matrix2d& cov2);

/// Joint product state: given system moments, thermal bath blocks.
GaussianState joint_initial_state(const ModelParams& params, const Eigen::Vector2d& mean2,
                                  const Eigen::Matrix2d& cov2);

/// Closed-form single-mode ergotropy,
/// W = (w/2)(tr cov + |mean|^2) - w sqrt(det cov).
double gaussian_ergotropy(const Eigen::Vector2d& mean2, const Eigen::Matrix2d& cov2,
                          double omega_s);

/// Starting dimension guess for converting the given moments to Fock space.
int estimate_fock_dim(const Eigen::Vector2d& mean2, const Eigen::Matrix2d& cov2);

/// Truncated Fock representation via the single-mode Williamson decomposition
/// (squeeze + rotation + displacement applied to a thermal core). Throws
/// TruncationOverflow when the top-level population reaches 1e-6.
DensityMatrix gaussian_to_fock(const Eigen::Vector2d& mean2, const Eigen::Matrix2d& cov2,
                               int dim);

/// gaussian_to_fock at the smallest adequate dimension, capped.
DensityMatrix gaussian_to_fock_auto(const Eigen::Vector2d& mean2, const Eigen::Matrix2d& cov2,
                                    int dim_cap = 400);

/// Reduced battery moments along a time grid.
struct GaussianTrajectory {
    std::vector<double> times;
    std::vector<Eigen::Vector2d> means;
    std::vector<Eigen::Matrix2d> covs;
    ModelParams params;
};

GaussianTrajectory simulate_gaussian(const Eigen::Vector2d& mean2, const Eigen::Matrix2d& cov2,
                                     const ModelParams& params, const std::vector<double>& grid);

/// Converts every grid point to a Fock state (dim = 0 chooses per point).
std::vector<DensityMatrix> to_fock_states(const GaussianTrajectory& traj, int dim = 0,
                                          int dim_cap = 400);

}  // namespace qb
