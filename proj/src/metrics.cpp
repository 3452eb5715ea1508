#include "qbattery/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace qb {

namespace {

// tr(A B) without forming the product.
double trace_product(const CMatrix& a, const CMatrix& b) {
    return a.cwiseProduct(b.transpose()).sum().real();
}

// Descending populations with stable index order; eigenvalues in [-1e-10, 0)
// are clipped to zero and the spectrum renormalized, anything lower is a
// corrupt state.
RVector clipped_descending_populations(const RVector& eigenvalues) {
    const int n = static_cast<int>(eigenvalues.size());
    RVector pops(n);
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        double v = eigenvalues(n - 1 - k);  // herm_eig is ascending
        if (v < 0.0) {
            if (v < -1e-10)
                throw std::invalid_argument("passive_state: state eigenvalue " +
                                            std::to_string(v) + " below -1e-10");
            v = 0.0;
        }
        pops(k) = v;
        sum += v;
    }
    if (sum <= 0.0) throw std::invalid_argument("passive_state: state has zero trace");
    return pops / sum;
}

bool identity_basis(const EigSystem& eig) {
    return (eig.vectors - CMatrix::Identity(eig.vectors.rows(), eig.vectors.cols()))
               .cwiseAbs()
               .maxCoeff() == 0.0;
}

}  // namespace

SystemHamiltonian prepare_hamiltonian(const TruncatedOperator& h) {
    return SystemHamiltonian{h, herm_eig(h)};
}

SystemHamiltonian battery_hamiltonian(double omega, int dim) {
    if (omega <= 0.0) throw std::invalid_argument("battery_hamiltonian: omega must be positive");
    if (dim < 2) throw std::invalid_argument("battery_hamiltonian: dim must be >= 2");
    CMatrix h = CMatrix::Zero(dim, dim);
    RVector values(dim);
    for (int k = 0; k < dim; ++k) {
        h(k, k) = omega * (k + 0.5);
        values(k) = omega * (k + 0.5);
    }
    // Fock basis is the eigenbasis; skip the dense solve.
    return SystemHamiltonian{make_operator({dim}, std::move(h)),
                             EigSystem{std::move(values), CMatrix::Identity(dim, dim)}};
}

PassiveDecomposition passive_state(const DensityMatrix& rho, const SystemHamiltonian& h) {
    const int n = rho.dim();
    if (n != h.op.dim())
        throw std::invalid_argument("passive_state: state/Hamiltonian dimension mismatch");

    const EigSystem rho_eig = herm_eig(rho.mat);
    PassiveDecomposition out;
    out.populations = clipped_descending_populations(rho_eig.values);
    out.energies = h.eig.values;

    // U = sum_j |eps_j><r_j| with r_j the j-th largest population's eigenvector.
    out.extraction = CMatrix::Zero(n, n);
    CMatrix passive = CMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        const CVector r_vec = rho_eig.vectors.col(n - 1 - j);
        out.extraction += h.eig.vectors.col(j) * r_vec.adjoint();
        passive += out.populations(j) *
                   (h.eig.vectors.col(j) * h.eig.vectors.col(j).adjoint());
    }
    out.passive = DensityMatrix{rho.dims, std::move(passive)};
    return out;
}

PassiveDecomposition passive_state(const DensityMatrix& rho, const TruncatedOperator& h) {
    return passive_state(rho, prepare_hamiltonian(h));
}

double ergotropy(const DensityMatrix& rho, const SystemHamiltonian& h) {
    const int n = rho.dim();
    if (n != h.op.dim())
        throw std::invalid_argument("ergotropy: state/Hamiltonian dimension mismatch");

    const EigSystem rho_eig = herm_eig(rho.mat);
    const RVector pops = clipped_descending_populations(rho_eig.values);

    const double e_rho = trace_product(h.op.mat, rho.mat);
    const double e_passive = pops.dot(h.eig.values);  // r_j paired with eps_j ascending
    const double w = e_rho - e_passive;

    // Independent route: W = sum_{j,i} r_j eps_i (|<r_j|eps_i>|^2 - delta_ij).
    const CMatrix overlap = identity_basis(h.eig)
                                ? CMatrix(rho_eig.vectors.adjoint())
                                : CMatrix(rho_eig.vectors.adjoint() * h.eig.vectors);
    double w_sum = 0.0;
    for (int j = 0; j < n; ++j) {
        const double r_j = pops(j);
        if (r_j == 0.0) continue;
        const int row = n - 1 - j;  // descending population order
        for (int i = 0; i < n; ++i) {
            const double ov = std::norm(overlap(row, i));
            w_sum += r_j * h.eig.values(i) * (ov - (i == j ? 1.0 : 0.0));
        }
    }
    const double tol = 1e-10 + 1e-14 * n * h.eig.values.cwiseAbs().sum();
    if (std::abs(w - w_sum) > tol)
        throw std::runtime_error("ergotropy: passive-state and double-sum routes disagree by " +
                                 std::to_string(std::abs(w - w_sum)));
    return std::max(w, 0.0);
}

double ergotropy(const DensityMatrix& rho, const TruncatedOperator& h) {
    return ergotropy(rho, prepare_hamiltonian(h));
}

double incoherent_ergotropy(const DensityMatrix& rho, const SystemHamiltonian& h) {
    const int n = rho.dim();
    if (n != h.op.dim())
        throw std::invalid_argument("incoherent_ergotropy: dimension mismatch");

    if (identity_basis(h.eig)) {
        // Dephased state is diagonal: both ergotropy routes collapse to the
        // population/energy pairing, no dense solve needed.
        RVector p = rho.mat.diagonal().real().cwiseMax(0.0);
        p /= p.sum();
        const double e_dephased = p.dot(h.eig.values);
        RVector sorted = p;
        std::sort(sorted.data(), sorted.data() + n, std::greater<double>());
        const double e_passive = sorted.dot(h.eig.values);
        return std::max(e_dephased - e_passive, 0.0);
    }

    CMatrix in_basis = h.eig.vectors.adjoint() * rho.mat * h.eig.vectors;
    CMatrix dephased = CMatrix::Zero(n, n);
    dephased.diagonal() = in_basis.diagonal().real().cast<Complex>();
    CMatrix back = h.eig.vectors * dephased * h.eig.vectors.adjoint();
    return ergotropy(DensityMatrix{rho.dims, std::move(back)}, h);
}

double incoherent_ergotropy(const DensityMatrix& rho, const TruncatedOperator& h) {
    return incoherent_ergotropy(rho, prepare_hamiltonian(h));
}

double coherent_ergotropy(const DensityMatrix& rho, const SystemHamiltonian& h) {
    return ergotropy(rho, h) - incoherent_ergotropy(rho, h);
}

double coherent_ergotropy(const DensityMatrix& rho, const TruncatedOperator& h) {
    const SystemHamiltonian prepared = prepare_hamiltonian(h);
    return coherent_ergotropy(rho, prepared);
}

double l1_coherence(const DensityMatrix& rho) {
    double s = 0.0;
    const int n = rho.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) s += std::abs(rho.mat(i, j));
    return s;
}

std::vector<double> instantaneous_power(const std::vector<double>& work,
                                        const std::vector<double>& times) {
    const int n = static_cast<int>(work.size());
    if (n < 3) throw std::invalid_argument("instantaneous_power: need at least 3 grid points");
    if (times.size() != work.size())
        throw std::invalid_argument("instantaneous_power: grid/series length mismatch");
    const double dt = times[1] - times[0];
    for (int k = 1; k < n; ++k)
        if (std::abs(times[k] - times[k - 1] - dt) > 1e-9 * std::max(dt, 1.0))
            throw std::invalid_argument("instantaneous_power: grid must be uniform");

    std::vector<double> p(n);
    p[0] = (-3.0 * work[0] + 4.0 * work[1] - work[2]) / (2.0 * dt);
    for (int k = 1; k < n - 1; ++k) p[k] = (work[k + 1] - work[k - 1]) / (2.0 * dt);
    p[n - 1] = (3.0 * work[n - 1] - 4.0 * work[n - 2] + work[n - 3]) / (2.0 * dt);
    return p;
}

double average_power(const std::vector<double>& work, const std::vector<double>& times,
                     int t0_index, int t_index) {
    if (t0_index < 0 || t_index >= static_cast<int>(work.size()) || t_index <= t0_index)
        throw std::invalid_argument("average_power: need t_index > t0_index within the grid");
    return (work[t_index] - work[t0_index]) / (times[t_index] - times[t0_index]);
}

std::vector<std::pair<int, int>> detect_charging_cycles(const std::vector<double>& work,
                                                        const std::vector<double>& times,
                                                        double noise_floor) {
    const auto p = instantaneous_power(work, times);
    const int n = static_cast<int>(p.size());
    // Sign of dW/dt with a deadband: values inside the floor inherit the
    // previous sign so micro-oscillations do not register as cycles.
    std::vector<std::pair<int, int>> cycles;
    int sign = 0;
    int pending_min = -1;
    for (int k = 0; k < n; ++k) {
        int s = sign;
        if (p[k] > noise_floor)
            s = 1;
        else if (p[k] < -noise_floor)
            s = -1;
        if (s == 1 && sign == -1) pending_min = k;       // local minimum of W
        if (s == -1 && sign == 1 && pending_min >= 0) {  // local maximum of W
            cycles.emplace_back(pending_min, k);
            pending_min = -1;
        }
        sign = s;
    }
    return cycles;
}

void quadrature_moments(const DensityMatrix& rho, Eigen::Vector2d& mean, Eigen::Matrix2d& cov) {
    const int n = rho.dim();
    const CMatrix a = destroy(n).mat;
    const CMatrix x = (a + a.adjoint()) / std::sqrt(2.0);
    const CMatrix y = Complex(0.0, 1.0) * (a.adjoint() - a) / std::sqrt(2.0);
    mean(0) = trace_product(x, rho.mat);
    mean(1) = trace_product(y, rho.mat);
    const double xx = trace_product(x * x, rho.mat);
    const double yy = trace_product(y * y, rho.mat);
    const double xy = trace_product(0.5 * (x * y + y * x), rho.mat);
    cov(0, 0) = xx - mean(0) * mean(0);
    cov(1, 1) = yy - mean(1) * mean(1);
    cov(0, 1) = cov(1, 0) = xy - mean(0) * mean(1);
}

ErgotropyReport build_report(const std::vector<double>& times,
                             const std::vector<DensityMatrix>& states, double omega_s) {
    if (times.size() != states.size())
        throw std::invalid_argument("build_report: grid/state count mismatch");
    const int n = static_cast<int>(times.size());
    ErgotropyReport rep;
    rep.times = times;
    rep.energy.resize(n);
    rep.work.resize(n);
    rep.work_incoh.resize(n);
    rep.work_coh.resize(n);
    rep.coherence.resize(n);
    rep.nu.resize(n);
    rep.purity.resize(n);

    // Trajectory states may differ in truncation; cache per-dimension operators.
    struct DimOps {
        SystemHamiltonian h;
        CMatrix x, y, xx, yy, xy_sym;
    };
    std::map<int, DimOps> cache;
    auto ops_for = [&](int dim) -> DimOps& {
        auto it = cache.find(dim);
        if (it == cache.end()) {
            DimOps ops{battery_hamiltonian(omega_s, dim), {}, {}, {}, {}, {}};
            const CMatrix a = destroy(dim).mat;
            ops.x = (a + a.adjoint()) / std::sqrt(2.0);
            ops.y = Complex(0.0, 1.0) * (a.adjoint() - a) / std::sqrt(2.0);
            ops.xx = ops.x * ops.x;
            ops.yy = ops.y * ops.y;
            ops.xy_sym = 0.5 * (ops.x * ops.y + ops.y * ops.x);
            it = cache.emplace(dim, std::move(ops)).first;
        }
        return it->second;
    };

    for (int k = 0; k < n; ++k) {
        const DensityMatrix& rho = states[k];
        DimOps& ops = ops_for(rho.dim());

        rep.energy[k] = trace_product(ops.h.op.mat, rho.mat);
        rep.work[k] = ergotropy(rho, ops.h);
        rep.work_incoh[k] = incoherent_ergotropy(rho, ops.h);
        rep.work_coh[k] = rep.work[k] - rep.work_incoh[k];
        rep.coherence[k] = l1_coherence(rho);
        rep.purity[k] = rho.mat.squaredNorm();  // tr(rho^2) for Hermitian rho

        Eigen::Vector2d mean;
        mean(0) = trace_product(ops.x, rho.mat);
        mean(1) = trace_product(ops.y, rho.mat);
        Eigen::Matrix2d cov;
        cov(0, 0) = trace_product(ops.xx, rho.mat) - mean(0) * mean(0);
        cov(1, 1) = trace_product(ops.yy, rho.mat) - mean(1) * mean(1);
        cov(0, 1) = cov(1, 0) = trace_product(ops.xy_sym, rho.mat) - mean(0) * mean(1);
        rep.nu[k] = std::sqrt(std::max(cov.determinant(), 0.0));
    }

    if (n >= 3)
        rep.power = instantaneous_power(rep.work, times);
    else
        rep.power.assign(n, 0.0);
    rep.avg_power.resize(n);
    rep.avg_power[0] = 0.0;
    for (int k = 1; k < n; ++k)
        rep.avg_power[k] = (rep.work[k] - rep.work[0]) / (times[k] - times[0]);
    return rep;
}

}  // namespace qb
