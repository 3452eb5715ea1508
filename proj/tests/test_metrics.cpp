#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qbattery/bath.hpp>
#include <qbattery/metrics.hpp>

#include "testutil.hpp"

#include <cmath>
#include <random>

using namespace qb;
using qbtest::random_density;
using qbtest::random_unitary;

namespace {

double trace_with(const CMatrix& h, const CMatrix& rho) {
    return (h * rho).trace().real();
}

}  // namespace

TEST_CASE("passive state of an already passive state is itself") {
    CMatrix rho = CMatrix::Zero(2, 2);
    rho(0, 0) = 0.7;
    rho(1, 1) = 0.3;
    auto h = battery_hamiltonian(1.0, 2);
    auto dec = passive_state(DensityMatrix{{2}, rho}, h);
    CHECK((dec.passive.mat - rho).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("passive state of |1><1| is the ground state") {
    auto h = battery_hamiltonian(1.0, 4);
    auto dec = passive_state(number_state(4, 1), h);
    CHECK(std::abs(dec.passive.mat(0, 0).real() - 1.0) < 1e-14);
    CHECK(std::abs(dec.passive.mat(1, 1).real()) < 1e-14);
}

TEST_CASE("passive decomposition invariants") {
    std::mt19937_64 rng(101);
    auto h = prepare_hamiltonian(make_operator({6}, qbtest::random_hermitian(6, rng)));
    for (int trial = 0; trial < 10; ++trial) {
        auto rho = random_density(6, rng);
        auto dec = passive_state(rho, h);

        for (int j = 1; j < 6; ++j) {
            CHECK(dec.populations(j) <= dec.populations(j - 1) + 1e-15);
            CHECK(dec.energies(j) >= dec.energies(j - 1));
        }
        // extraction unitary
        CHECK((dec.extraction.adjoint() * dec.extraction - CMatrix::Identity(6, 6))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
        // passive state commutes with H and carries the same spectrum as rho
        CMatrix comm = dec.passive.mat * h.op.mat - h.op.mat * dec.passive.mat;
        CHECK(comm.cwiseAbs().maxCoeff() < 1e-10);
        auto spec = herm_eig(dec.passive.mat);
        auto rho_spec = herm_eig(rho.mat);
        for (int j = 0; j < 6; ++j)
            CHECK(std::abs(spec.values(j) - rho_spec.values(j)) < 1e-10);
        // U rho U^dag equals the passive state
        CMatrix rotated = dec.extraction * rho.mat * dec.extraction.adjoint();
        CHECK((rotated - dec.passive.mat).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("passive state is the unitary-orbit energy floor (Monte Carlo)") {
    std::mt19937_64 rng(103);
    auto h = battery_hamiltonian(1.0, 6);
    auto rho = random_density(6, rng);
    auto dec = passive_state(rho, h);
    const double floor_energy = trace_with(h.op.mat, dec.passive.mat);
    for (int trial = 0; trial < 2000; ++trial) {
        CMatrix u = random_unitary(6, rng);
        const double e = trace_with(h.op.mat, CMatrix(u * rho.mat * u.adjoint()));
        CHECK(e >= floor_energy - 1e-10);
    }
}

TEST_CASE("ergotropy of thermal states vanishes") {
    auto h = battery_hamiltonian(1.0, 24);
    for (double temp : {0.2, 1.0, 3.0}) {
        auto th = thermal_state_fock(1.0, temp, 24);
        CHECK(ergotropy(th, h) <= 1e-12);
    }
}

TEST_CASE("ergotropy of the sqrt(3)/2, 1/2 superposition is 1/4") {
    auto h = battery_hamiltonian(1.0, 8);
    auto psi = superposition_state(8, Complex(std::sqrt(3.0) / 2.0, 0.0), Complex(0.5, 0.0));
    CHECK(std::abs(ergotropy(psi, h) - 0.25) < 1e-10);
    // incoherent part vanishes: dephased diag(3/4, 1/4) is already passive
    CHECK(incoherent_ergotropy(psi, h) < 1e-10);
    CHECK(std::abs(coherent_ergotropy(psi, h) - 0.25) < 1e-10);
    CHECK(std::abs(l1_coherence(psi) - std::sqrt(3.0) / 2.0) < 1e-10);
}

TEST_CASE("ergotropy of a coherent state is omega |alpha|^2") {
    const Complex alpha(3.0, 4.0);
    const int dim = 90;
    for (double w : {1.0, 1.3}) {
        auto h = battery_hamiltonian(w, dim);
        auto rho = coherent_state(dim, alpha);
        CHECK(std::abs(ergotropy(rho, h) - w * 25.0) < 1e-8);
    }
}

TEST_CASE("pure-state ergotropy equals mean energy minus ground energy") {
    std::mt19937_64 rng(107);
    auto h = battery_hamiltonian(0.9, 7);
    for (int trial = 0; trial < 20; ++trial) {
        auto psi = qbtest::random_pure(7, rng);
        const double expected = trace_with(h.op.mat, psi.mat) - h.eig.values(0);
        CHECK(std::abs(ergotropy(psi, h) - expected) < 1e-10);
    }
}

TEST_CASE("population-inverted superposition keeps only the inversion work") {
    auto h = battery_hamiltonian(1.0, 6);
    auto psi = superposition_state(6, Complex(0.5, 0.0), Complex(std::sqrt(3.0) / 2.0, 0.0));
    // dephased diag(1/4, 3/4) relaxes to diag(3/4, 1/4): W_i = omega/2
    CHECK(std::abs(incoherent_ergotropy(psi, h) - 0.5) < 1e-10);
}

TEST_CASE("diagonal states have no coherent ergotropy") {
    std::mt19937_64 rng(109);
    auto h = battery_hamiltonian(1.0, 5);
    for (int trial = 0; trial < 10; ++trial) {
        auto rho = random_density(5, rng);
        CMatrix diag = CMatrix::Zero(5, 5);
        diag.diagonal() = rho.mat.diagonal();
        DensityMatrix d{{5}, diag};
        const double w = ergotropy(d, h);
        CHECK(std::abs(incoherent_ergotropy(d, h) - w) < 1e-12);
        CHECK(std::abs(coherent_ergotropy(d, h)) < 1e-12);
        CHECK(l1_coherence(d) == 0.0);
    }
}

TEST_CASE("ergotropy split identity and nonnegativity on random states") {
    std::mt19937_64 rng(113);
    for (int trial = 0; trial < 2000; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 7);
        auto h = battery_hamiltonian(1.0, dim);
        auto rho = random_density(dim, rng);
        const double w = ergotropy(rho, h);
        const double wi = incoherent_ergotropy(rho, h);
        const double wc = coherent_ergotropy(rho, h);
        CHECK(w >= -1e-10);
        CHECK(wi >= -1e-10);
        CHECK(wc >= -1e-10);
        CHECK(std::abs(w - (wi + wc)) <= 1e-10);
        CHECK(wi <= w + 1e-10);
    }
}

TEST_CASE("ergotropy with a non-diagonal Hamiltonian basis") {
    std::mt19937_64 rng(127);
    // Rotate a diagonal Hamiltonian; the physics must not change.
    auto h_diag = battery_hamiltonian(1.0, 5);
    CMatrix u = random_unitary(5, rng);
    auto h_rot = prepare_hamiltonian(make_operator({5}, u * h_diag.op.mat * u.adjoint()));
    for (int trial = 0; trial < 10; ++trial) {
        auto rho = random_density(5, rng);
        DensityMatrix rho_rot{{5}, u * rho.mat * u.adjoint()};
        CHECK(std::abs(ergotropy(rho, h_diag) - ergotropy(rho_rot, h_rot)) < 1e-10);
        CHECK(std::abs(incoherent_ergotropy(rho, h_diag) -
                       incoherent_ergotropy(rho_rot, h_rot)) < 1e-10);
    }
}

TEST_CASE("ergotropy is invariant under relabeling of degenerate eigenvectors") {
    std::mt19937_64 rng(131);
    CMatrix h = CMatrix::Zero(4, 4);
    h(0, 0) = 1.0;
    h(1, 1) = 2.0;
    h(2, 2) = 2.0;  // degenerate block {1, 2}
    h(3, 3) = 3.0;
    auto base = prepare_hamiltonian(make_operator({4}, h));
    for (int trial = 0; trial < 10; ++trial) {
        CMatrix block = random_unitary(2, rng);
        CMatrix u = CMatrix::Identity(4, 4);
        u.block(1, 1, 2, 2) = block;
        auto relabeled = prepare_hamiltonian(make_operator({4}, u * h * u.adjoint()));
        auto rho = random_density(4, rng);
        CHECK(std::abs(ergotropy(rho, base) - ergotropy(rho, relabeled)) < 1e-10);
    }
}

TEST_CASE("l1 coherence of the balanced superposition is 1") {
    auto psi = superposition_state(4, Complex(1.0, 0.0), Complex(1.0, 0.0));
    CHECK(std::abs(l1_coherence(psi) - 1.0) < 1e-12);
}

TEST_CASE("instantaneous power finite differences") {
    std::vector<double> times, constant, linear, sine;
    for (int k = 0; k <= 1000; ++k) {
        const double t = 0.01 * k;
        times.push_back(t);
        constant.push_back(2.5);
        linear.push_back(t);
        sine.push_back(std::sin(t));
    }
    for (double p : instantaneous_power(constant, times)) CHECK(std::abs(p) < 1e-12);
    for (double p : instantaneous_power(linear, times)) CHECK(std::abs(p - 1.0) < 1e-10);
    auto dsine = instantaneous_power(sine, times);
    double max_err = 0.0;
    for (size_t k = 0; k < times.size(); ++k)
        max_err = std::max(max_err, std::abs(dsine[k] - std::cos(times[k])));
    CHECK(max_err <= 1e-4);

    std::vector<double> too_short{0.0, 1.0};
    CHECK_THROWS_AS(instantaneous_power(too_short, {0.0, 0.1}), std::invalid_argument);
}

TEST_CASE("average power") {
    std::vector<double> times{0.0, 1.0, 2.0, 3.0, 4.0};
    std::vector<double> flat(5, 1.0);
    CHECK(average_power(flat, times, 0, 4) == 0.0);
    std::vector<double> rising{0.0, 0.5, 1.0, 1.5, 2.0};
    CHECK(std::abs(average_power(rising, times, 0, 4) - 0.5) < 1e-15);
    CHECK_THROWS_AS(average_power(flat, times, 2, 2), std::invalid_argument);
}

TEST_CASE("charging cycles of 1 - e^{-t} cos t match analytic extrema") {
    std::vector<double> times, w;
    const double dt = 0.01;
    for (int k = 0; k <= 2000; ++k) {
        const double t = dt * k;
        times.push_back(t);
        w.push_back(1.0 - std::exp(-t) * std::cos(t));
    }
    // dW/dt = e^{-t}(cos t + sin t) vanishes at t = 3 pi/4 + k pi
    auto cycles = detect_charging_cycles(w, times, 1e-8);
    REQUIRE(cycles.size() >= 2);
    // first cycle: minimum at 7 pi/4, maximum at 11 pi/4
    const double pi = std::numbers::pi;
    CHECK(std::abs(times[cycles[0].first] - 7.0 * pi / 4.0) <= dt + 1e-12);
    CHECK(std::abs(times[cycles[0].second] - 11.0 * pi / 4.0) <= dt + 1e-12);
    CHECK(std::abs(times[cycles[1].first] - 15.0 * pi / 4.0) <= dt + 1e-12);

    // monotone series has no cycles
    std::vector<double> mono;
    for (double t : times) mono.push_back(-t);
    CHECK(detect_charging_cycles(mono, times, 1e-8).empty());
}

TEST_CASE("quadrature moments of coherent and thermal states") {
    const Complex alpha(0.7, -1.1);
    auto rho = coherent_state(40, alpha);
    Eigen::Vector2d mean;
    Eigen::Matrix2d cov;
    quadrature_moments(rho, mean, cov);
    CHECK(std::abs(mean(0) - std::sqrt(2.0) * alpha.real()) < 1e-10);
    CHECK(std::abs(mean(1) - std::sqrt(2.0) * alpha.imag()) < 1e-10);
    CHECK((cov - Eigen::Matrix2d::Identity() * 0.5).cwiseAbs().maxCoeff() < 1e-9);

    const double w = 1.0, temp = 0.8;
    auto th = thermal_state_fock(w, temp, thermal_dim_for_tail(w, temp, 1e-12, 3, 128));
    quadrature_moments(th, mean, cov);
    const double nu = thermal_covariance(w, temp)(0, 0);
    CHECK(std::abs(cov(0, 0) - nu) < 1e-8);
    CHECK(std::abs(cov(1, 1) - nu) < 1e-8);
    CHECK(std::abs(cov(0, 1)) < 1e-10);
}

TEST_CASE("report over a synthetic trajectory") {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    for (int k = 0; k < 5; ++k) {
        times.push_back(0.1 * k);
        states.push_back(coherent_state(25, Complex(0.5 - 0.05 * k, 0.0)));
    }
    auto rep = build_report(times, states, 1.0);
    for (int k = 0; k < 5; ++k) {
        CHECK(std::abs(rep.work[k] - (rep.work_incoh[k] + rep.work_coh[k])) <= 1e-10);
        CHECK(rep.work[k] >= -1e-10);
        CHECK(rep.purity[k] > 0.999);
        CHECK(rep.nu[k] >= 0.5 - 1e-9);
    }
    CHECK(rep.avg_power[0] == 0.0);
    CHECK(rep.power.size() == times.size());
}
