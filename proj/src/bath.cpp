#include "qbattery/bath.hpp"

#include <cmath>
#include <numbers>

namespace qb {

void validate(const ModelParams& params) {
    if (params.mass <= 0.0) throw std::invalid_argument("params: mass must be positive");
    if (params.omega_s <= 0.0) throw std::invalid_argument("params: omega_s must be positive");
    if (params.temperature < 0.0)
        throw std::invalid_argument("params: temperature must be nonnegative");
    if (params.form == CouplingForm::SubtractiveMu && params.coupling < 0.0)
        throw std::invalid_argument("params: mu must be nonnegative");
    if (params.form == CouplingForm::ConvexMuTilde &&
        (params.coupling < 0.0 || params.coupling > 1.0))
        throw std::invalid_argument("params: mu-tilde must lie in [0, 1]");
    const BathSpec& b = params.bath;
    if (b.n_modes < 1) throw std::invalid_argument("bath: n_modes must be >= 1");
    if (b.eta < 0.0) throw std::invalid_argument("bath: eta must be nonnegative");
    if (b.cutoff <= 0.0) throw std::invalid_argument("bath: cutoff must be positive");
    if (b.omega_max < b.cutoff)
        throw std::invalid_argument("bath: omega_max must be >= cutoff");
}

double spectral_density(double omega, const BathSpec& spec) {
    if (omega < 0.0) throw std::invalid_argument("spectral_density: omega must be >= 0");
    return spec.eta * omega * std::exp(-omega / spec.cutoff);
}

BathDiscretization discretize_bath(const BathSpec& spec) {
    if (spec.n_modes < 1) throw std::invalid_argument("discretize_bath: n_modes must be >= 1");
    const double domega = spec.omega_max / spec.n_modes;
    BathDiscretization disc;
    disc.omegas.resize(spec.n_modes);
    disc.couplings.resize(spec.n_modes);
    for (int n = 0; n < spec.n_modes; ++n) {
        const double w = (n + 1) * domega;
        disc.omegas[n] = w;
        const double c2 = (2.0 / std::numbers::pi) * spectral_density(w, spec) * w * domega;
        disc.couplings[n] = std::sqrt(c2);
    }
    return disc;
}

std::pair<double, double> coupling_weights(const ModelParams& params) {
    if (params.form == CouplingForm::SubtractiveMu) return {1.0, -params.coupling};
    return {1.0 - params.coupling, params.coupling};
}

TruncatedOperator coupling_operator(const ModelParams& params, int dim) {
    validate(params);
    auto [q, p] = quadratures(dim, params.mass, params.omega_s);
    auto [wq, wp] = coupling_weights(params);
    return make_operator({dim}, wq * q.mat + wp * p.mat);
}

namespace {

// Multiplicities before/after mode k in the Kronecker layout.
struct ModeSplit {
    long long pre = 1, post = 1;
};

ModeSplit mode_split(const std::vector<int>& dims, int k) {
    ModeSplit s;
    for (int i = 0; i < k; ++i) s.pre *= dims[i];
    for (int i = k + 1; i < static_cast<int>(dims.size()); ++i) s.post *= dims[i];
    return s;
}

// H += I x ... x A(mode k) x ... x I
void add_single_mode(CMatrix& h, const std::vector<int>& dims, int k, const CMatrix& a) {
    const auto [pre, post] = mode_split(dims, k);
    const int d = dims[k];
    for (long long i = 0; i < pre; ++i)
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                const Complex v = a(r, c);
                if (v == Complex(0.0, 0.0)) continue;
                const long long row0 = (i * d + r) * post;
                const long long col0 = (i * d + c) * post;
                for (long long s = 0; s < post; ++s) h(row0 + s, col0 + s) += v;
            }
}

// H += scale * (A at mode k) (B at mode l), k < l, identities elsewhere.
void add_two_mode(CMatrix& h, const std::vector<int>& dims, int k, const CMatrix& a, int l,
                  const CMatrix& b, double scale) {
    const auto [pre_k, post_k] = mode_split(dims, k);
    const auto [pre_l, post_l] = mode_split(dims, l);
    const long long mid = pre_l / (pre_k * dims[k]);  // product of dims strictly between k and l
    const int dk = dims[k];
    const int dl = dims[l];
    for (long long i = 0; i < pre_k; ++i)
        for (int r = 0; r < dk; ++r)
            for (int c = 0; c < dk; ++c) {
                const Complex va = scale * a(r, c);
                if (va == Complex(0.0, 0.0)) continue;
                for (long long j = 0; j < mid; ++j)
                    for (int u = 0; u < dl; ++u)
                        for (int v = 0; v < dl; ++v) {
                            const Complex vb = b(u, v);
                            if (vb == Complex(0.0, 0.0)) continue;
                            const long long row = (((i * dk + r) * mid + j) * dl + u) * post_l;
                            const long long col = (((i * dk + c) * mid + j) * dl + v) * post_l;
                            for (long long s = 0; s < post_l; ++s)
                                h(row + s, col + s) += va * vb;
                        }
            }
}

}  // namespace

TruncatedOperator build_total_hamiltonian(const ModelParams& params,
                                          const std::vector<int>& dims) {
    validate(params);
    const auto disc = discretize_bath(params.bath);
    const int n_modes = params.bath.n_modes;
    if (static_cast<int>(dims.size()) != n_modes + 1)
        throw std::invalid_argument("build_total_hamiltonian: dims must have N + 1 entries");
    for (int d : dims)
        if (d < 2) throw std::invalid_argument("build_total_hamiltonian: every dim must be >= 2");

    const long long total = total_dim(dims);
    CMatrix h = CMatrix::Zero(total, total);

    auto [qs, ps] = quadratures(dims[0], params.mass, params.omega_s);
    CMatrix h_sys = ps.mat * ps.mat / (2.0 * params.mass) +
                    0.5 * params.mass * params.omega_s * params.omega_s * qs.mat * qs.mat;
    add_single_mode(h, dims, 0, h_sys);

    const CMatrix coupling = coupling_operator(params, dims[0]).mat;

    for (int n = 0; n < n_modes; ++n) {
        const double w = disc.omegas[n];
        auto [qn, pn] = quadratures(dims[n + 1], 1.0, w);
        CMatrix h_mode = 0.5 * pn.mat * pn.mat + 0.5 * w * w * qn.mat * qn.mat;
        add_single_mode(h, dims, n + 1, h_mode);
        if (disc.couplings[n] != 0.0)
            add_two_mode(h, dims, 0, coupling, n + 1, qn.mat, disc.couplings[n]);
    }

    return make_operator(dims, std::move(h));
}

QuadraticForm quadratic_form(const ModelParams& params) {
    validate(params);
    const auto disc = discretize_bath(params.bath);
    const int n = params.bath.n_modes;
    RMatrix m = RMatrix::Zero(2 * (n + 1), 2 * (n + 1));
    m(0, 0) = params.mass * params.omega_s * params.omega_s;
    m(1, 1) = 1.0 / params.mass;
    const auto [wq, wp] = coupling_weights(params);
    for (int k = 0; k < n; ++k) {
        const int iq = 2 * (k + 1);
        const int ip = iq + 1;
        m(iq, iq) = disc.omegas[k] * disc.omegas[k];
        m(ip, ip) = 1.0;
        m(0, iq) = m(iq, 0) = disc.couplings[k] * wq;
        m(1, iq) = m(iq, 1) = disc.couplings[k] * wp;
    }
    return QuadraticForm{std::move(m)};
}

RVector physical_scaling(const ModelParams& params) {
    const auto disc = discretize_bath(params.bath);
    const int n = params.bath.n_modes;
    RVector lambda(2 * (n + 1));
    const double s = std::sqrt(params.mass * params.omega_s);
    lambda(0) = 1.0 / s;
    lambda(1) = s;
    for (int k = 0; k < n; ++k) {
        const double r = std::sqrt(disc.omegas[k]);
        lambda(2 * (k + 1)) = 1.0 / r;
        lambda(2 * (k + 1) + 1) = r;
    }
    return lambda;
}

QuadraticForm dimensionless_form(const ModelParams& params) {
    QuadraticForm physical = quadratic_form(params);
    const RVector lambda = physical_scaling(params);
    RMatrix m = lambda.asDiagonal() * physical.mat * lambda.asDiagonal();
    return QuadraticForm{std::move(m)};
}

double bose_occupation(double omega, double temperature) {
    if (omega <= 0.0) throw std::invalid_argument("bose_occupation: omega must be positive");
    if (temperature <= 0.0) return 0.0;
    return 1.0 / std::expm1(omega / temperature);
}

DensityMatrix thermal_state_fock(double omega, double temperature, int dim) {
    if (dim < 2) throw std::invalid_argument("thermal_state_fock: dim must be >= 2");
    if (temperature < 0.0)
        throw std::invalid_argument("thermal_state_fock: temperature must be >= 0");
    CMatrix rho = CMatrix::Zero(dim, dim);
    if (temperature == 0.0) {
        rho(0, 0) = 1.0;
        return DensityMatrix{{dim}, std::move(rho)};
    }
    const double x = std::exp(-omega / temperature);
    double norm = 0.0;
    double weight = 1.0;
    for (int k = 0; k < dim; ++k) {
        rho(k, k) = weight;
        norm += weight;
        weight *= x;
    }
    rho /= norm;
    return DensityMatrix{{dim}, std::move(rho)};
}

Eigen::Matrix2d thermal_covariance(double omega, double temperature) {
    if (omega <= 0.0) throw std::invalid_argument("thermal_covariance: omega must be positive");
    if (temperature < 0.0)
        throw std::invalid_argument("thermal_covariance: temperature must be >= 0");
    const double nu =
        temperature == 0.0 ? 0.5 : 0.5 / std::tanh(omega / (2.0 * temperature));
    return Eigen::Matrix2d::Identity() * nu;
}

int thermal_dim_for_tail(double omega, double temperature, double tail, int min_dim,
                         int max_dim) {
    if (temperature <= 0.0) return min_dim;
    const double x = std::exp(-omega / temperature);
    int d = min_dim;
    while (d < max_dim && (1.0 - x) * std::pow(x, d - 1) >= tail) ++d;
    return d;
}

}  // namespace qb
