#include "qbattery/gaussian.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace qb {

RMatrix symplectic_form(int n_pairs) {
    RMatrix omega = RMatrix::Zero(2 * n_pairs, 2 * n_pairs);
    for (int k = 0; k < n_pairs; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

GaussianEvolver::GaussianEvolver(const QuadraticForm& form) {
    const RMatrix& m = form.mat;
    if (m.rows() != m.cols() || m.rows() % 2 != 0)
        throw std::invalid_argument("GaussianEvolver: quadratic form must be even-sided square");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("GaussianEvolver: quadratic form must be symmetric");
    side_ = static_cast<int>(m.rows());
    const RMatrix omega = symplectic_form(side_ / 2);
    a_ = omega * m;

    // Positive-definite form: Omega M is similar to the antisymmetric
    // L^T Omega L through the Cholesky factor, and i L^T Omega L is Hermitian,
    // so the normal-mode decomposition comes from a perfectly conditioned
    // Hermitian solve.
    Eigen::LLT<RMatrix> llt(m);
    if (llt.info() == Eigen::Success) {
        const RMatrix l = llt.matrixL();
        const RMatrix c = l.transpose() * omega * l;
        const CMatrix hc = Complex(0.0, 1.0) * c.cast<Complex>();
        const EigSystem es = herm_eig(hc);
        gamma_ = (Complex(0.0, -1.0) * es.values.cast<Complex>().array()).matrix();
        // P = L^{-T} V, P^{-1} = V^H L^T
        const CMatrix lt = l.transpose().cast<Complex>();
        p_ = lt.triangularView<Eigen::Upper>().solve(es.vectors);
        q_ = es.vectors.adjoint() * lt;
        spectral_ok_ = true;
    } else {
        // Indefinite form: general complex eigendecomposition, verified.
        Eigen::ComplexEigenSolver<CMatrix> solver(a_.cast<Complex>());
        if (solver.info() == Eigen::Success) {
            p_ = solver.eigenvectors();
            gamma_ = solver.eigenvalues();
            Eigen::FullPivLU<CMatrix> lu(p_);
            if (lu.isInvertible()) {
                q_ = lu.inverse();
                const double resid =
                    (p_ * gamma_.asDiagonal() * q_ - a_.cast<Complex>()).cwiseAbs().maxCoeff();
                spectral_ok_ = resid <= 1e-9 * std::max(1.0, a_.cwiseAbs().maxCoeff());
            }
        }
    }
}

SymplecticPropagator GaussianEvolver::propagator(double t) const {
    RMatrix s;
    if (spectral_ok_) {
        CVector phases(side_);
        for (int j = 0; j < side_; ++j) phases(j) = std::exp(gamma_(j) * t);
        const CMatrix sc = p_ * phases.asDiagonal() * q_;
        s = sc.real();
    } else {
        s = RMatrix((a_ * t).exp());
    }
    const RMatrix omega = symplectic_form(side_ / 2);
    const double defect = (s * omega * s.transpose() - omega).cwiseAbs().maxCoeff();
    if (defect > 1e-9)
        throw std::runtime_error("symplectic propagator defect " + std::to_string(defect) +
                                 " exceeds 1e-9");
    return SymplecticPropagator{std::move(s)};
}

GaussianEvolver::Propagated GaussianEvolver::prepare(const GaussianState& g0) const {
    if (g0.mean.size() != side_ || g0.cov.rows() != side_)
        throw std::invalid_argument("GaussianEvolver: state dimension mismatch");
    Propagated prop;
    prop.evolver_ = this;
    prop.g0_ = g0;
    if (spectral_ok_) {
        prop.w_ = q_ * g0.mean.cast<Complex>();
        prop.k_ = q_ * g0.cov.cast<Complex>() * q_.transpose();
    }
    return prop;
}

void GaussianEvolver::Propagated::reduced(double t, Eigen::Vector2d& mean2,
                                          Eigen::Matrix2d& cov2) const {
    const GaussianEvolver& ev = *evolver_;
    if (ev.spectral_ok_) {
        CVector phases(ev.side_);
        for (int j = 0; j < ev.side_; ++j) phases(j) = std::exp(ev.gamma_(j) * t);
        // Z = (rows 0..1 of P) scaled by the phases
        Eigen::Matrix<Complex, 2, Eigen::Dynamic> z =
            ev.p_.topRows<2>() * phases.asDiagonal();
        const Eigen::Vector2cd m = z * w_;
        const Eigen::Matrix2cd c = z * k_ * z.transpose();
        mean2 = m.real();
        cov2 = c.real();
        cov2 = 0.5 * (cov2 + cov2.transpose());
    } else {
        const SymplecticPropagator s = ev.propagator(t);
        const GaussianState g = evolve_gaussian(g0_, s);
        reduce_to_system(g, mean2, cov2);
    }
}

GaussianState evolve_gaussian(const GaussianState& g, const SymplecticPropagator& s) {
    if (g.mean.size() != s.s.rows())
        throw std::invalid_argument("evolve_gaussian: dimension mismatch");
    GaussianState out;
    out.mean = s.s * g.mean;
    out.cov = s.s * g.cov * s.s.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    return out;
}

void reduce_to_system(const GaussianState& g, Eigen::Vector2d& mean2, Eigen::Matrix2d& cov2) {
    mean2 = g.mean.head<2>();
    cov2 = g.cov.topLeftCorner<2, 2>();
}

GaussianState joint_initial_state(const ModelParams& params, const Eigen::Vector2d& mean2,
                                  const Eigen::Matrix2d& cov2) {
    validate(params);
    const auto disc = discretize_bath(params.bath);
    const int n = params.bath.n_modes;
    GaussianState g;
    g.mean = RVector::Zero(2 * (n + 1));
    g.cov = RMatrix::Zero(2 * (n + 1), 2 * (n + 1));
    g.mean.head<2>() = mean2;
    g.cov.topLeftCorner<2, 2>() = cov2;
    for (int k = 0; k < n; ++k)
        g.cov.block<2, 2>(2 * (k + 1), 2 * (k + 1)) =
            thermal_covariance(disc.omegas[k], params.temperature);
    return g;
}

double gaussian_ergotropy(const Eigen::Vector2d& mean2, const Eigen::Matrix2d& cov2,
                          double omega_s) {
    const double det = cov2.determinant();
    if (det < 0.0)
        throw std::invalid_argument("gaussian_ergotropy: covariance is not positive");
    const double w = 0.5 * omega_s * (cov2.trace() + mean2.squaredNorm()) -
                     omega_s * std::sqrt(det);
    return std::max(w, 0.0);
}

namespace {

CMatrix rotation_unitary(int dim, double angle) {
    CMatrix u = CMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) u(k, k) = std::exp(Complex(0.0, -angle * k));
    return u;
}

CMatrix squeeze_unitary(int dim, double xi) {
    const CMatrix a = destroy(dim).mat;
    const CMatrix g = 0.5 * xi * (a * a - (a * a).adjoint());   // anti-Hermitian
    const EigSystem es = herm_eig(CMatrix(Complex(0.0, 1.0) * g));
    CVector phases(dim);
    for (int k = 0; k < dim; ++k) phases(k) = std::exp(Complex(0.0, -es.values(k)));
    return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

CMatrix displacement_unitary(int dim, Complex beta) {
    const CMatrix a = destroy(dim).mat;
    const CMatrix g = beta * a.adjoint() - std::conj(beta) * a;  // anti-Hermitian
    const EigSystem es = herm_eig(CMatrix(Complex(0.0, 1.0) * g));
    CVector phases(dim);
    for (int k = 0; k < dim; ++k) phases(k) = std::exp(Complex(0.0, -es.values(k)));
    return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

}  // namespace

int estimate_fock_dim(const Eigen::Vector2d& mean2, const Eigen::Matrix2d& cov2) {
    const double mean_n = 0.5 * (cov2.trace() + mean2.squaredNorm()) - 0.5;
    const double n_eff = std::max(mean_n, 0.0);
    return std::max(8, static_cast<int>(std::ceil(n_eff + 7.0 * std::sqrt(n_eff + 1.0) + 12.0)));
}

DensityMatrix gaussian_to_fock(const Eigen::Vector2d& mean2, const Eigen::Matrix2d& cov2,
                               int dim) {
    if (dim < 2) throw std::invalid_argument("gaussian_to_fock: dim must be >= 2");
    if (std::abs(cov2(0, 1) - cov2(1, 0)) > 1e-10)
        throw std::invalid_argument("gaussian_to_fock: covariance must be symmetric");
    const double det = cov2.determinant();
    double nu = det > 0.0 ? std::sqrt(det) : 0.0;
    if (nu < 0.5 - 1e-9)
        throw std::invalid_argument("gaussian_to_fock: unphysical covariance, nu = " +
                                    std::to_string(nu));
    nu = std::max(nu, 0.5);

    // Single-mode Williamson: cov = nu R(theta) diag(e^{-2 xi}, e^{2 xi}) R(theta)^T.
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov2 / nu);
    Eigen::Matrix2d rot = es.eigenvectors();
    if (rot.determinant() < 0.0) rot.col(0) *= -1.0;
    const double theta = std::atan2(rot(1, 0), rot(0, 0));
    const double xi = -0.5 * std::log(es.eigenvalues()(0));  // >= 0, eigenvalues ascending

    // thermal core with occupation n_bar
    const double n_bar = nu - 0.5;
    CMatrix core = CMatrix::Zero(dim, dim);
    if (n_bar <= 0.0) {
        core(0, 0) = 1.0;
    } else {
        const double x = n_bar / (n_bar + 1.0);
        double weight = 1.0, norm = 0.0;
        for (int k = 0; k < dim; ++k) {
            core(k, k) = weight;
            norm += weight;
            weight *= x;
        }
        core /= norm;
    }

    const Complex beta = Complex(mean2(0), mean2(1)) / std::sqrt(2.0);
    // Symplectic actions compose left to right; rotation_unitary(phi) acts as
    // R(-phi), so this chain realizes R(theta) Z(xi) R(theta)^T, then the shift.
    CMatrix u = rotation_unitary(dim, -theta) * squeeze_unitary(dim, xi) *
                rotation_unitary(dim, theta);
    if (beta != Complex(0.0, 0.0)) u = displacement_unitary(dim, beta) * u;

    CMatrix rho = u * core * u.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint());

    const double top = rho(dim - 1, dim - 1).real();
    if (top >= 1e-6)
        throw TruncationOverflow("gaussian_to_fock: top-level population " +
                                 std::to_string(top) + " at dim " + std::to_string(dim));
    return DensityMatrix{{dim}, std::move(rho)};
}

DensityMatrix gaussian_to_fock_auto(const Eigen::Vector2d& mean2, const Eigen::Matrix2d& cov2,
                                    int dim_cap) {
    int dim = std::min(estimate_fock_dim(mean2, cov2), dim_cap);
    while (true) {
        try {
            return gaussian_to_fock(mean2, cov2, dim);
        } catch (const TruncationOverflow&) {
            if (dim >= dim_cap) throw;
            dim = std::min(dim_cap, dim + std::max(8, dim / 4));
        }
    }
}

GaussianTrajectory simulate_gaussian(const Eigen::Vector2d& mean2, const Eigen::Matrix2d& cov2,
                                     const ModelParams& params,
                                     const std::vector<double>& grid) {
    if (grid.empty() || grid.front() != 0.0)
        throw std::invalid_argument("simulate_gaussian: grid must start at 0");
    for (size_t k = 1; k < grid.size(); ++k)
        if (grid[k] <= grid[k - 1])
            throw std::invalid_argument("simulate_gaussian: grid must be strictly ascending");

    const GaussianEvolver evolver(dimensionless_form(params));
    const auto prop = evolver.prepare(joint_initial_state(params, mean2, cov2));

    GaussianTrajectory traj;
    traj.times = grid;
    traj.params = params;
    traj.means.resize(grid.size());
    traj.covs.resize(grid.size());
    for (size_t k = 0; k < grid.size(); ++k) {
        prop.reduced(grid[k], traj.means[k], traj.covs[k]);
        const double nu = std::sqrt(std::max(traj.covs[k].determinant(), 0.0));
        if (nu < 0.5 - 1e-9)
            throw std::runtime_error("simulate_gaussian: reduced state violates nu >= 1/2 at t=" +
                                     std::to_string(grid[k]));
    }
    return traj;
}

std::vector<DensityMatrix> to_fock_states(const GaussianTrajectory& traj, int dim, int dim_cap) {
    std::vector<DensityMatrix> states;
    states.reserve(traj.times.size());
    for (size_t k = 0; k < traj.times.size(); ++k) {
        if (dim > 0)
            states.push_back(gaussian_to_fock(traj.means[k], traj.covs[k], dim));
        else
            states.push_back(gaussian_to_fock_auto(traj.means[k], traj.covs[k], dim_cap));
    }
    return states;
}

}  // namespace qb
