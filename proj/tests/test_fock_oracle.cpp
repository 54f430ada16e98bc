#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tdho/fock_oracle.hpp"

using tdho::Complex;
using tdho::FockState;
using tdho::Profile;

constexpr double pi = std::numbers::pi;

namespace {

FockState squeezed_vacuum(double r, double phi, std::size_t n_max) {
    std::vector<Complex> c(n_max + 1);
    const Complex x = -0.5 * std::exp(Complex(0, phi)) * std::tanh(r);
    for (std::size_t n = 0; 2 * n <= n_max; ++n) {
        const double k = static_cast<double>(n);
        c[2 * n] = std::exp(0.5 * std::lgamma(2 * k + 1) - std::lgamma(k + 1)) * std::pow(x, static_cast<int>(n)) /
                   std::sqrt(std::cosh(r));
    }
    return FockState(std::move(c));
}

double odd_population(const FockState& s) {
    double p = 0.0;
    for (std::size_t n = 1; n < s.amplitudes.size(); n += 2) p += std::norm(s.amplitudes[n]);
    return p;
}

}  // namespace

TEST_CASE("Hamiltonian matrix elements") {
    const auto h = tdho::TruncatedHamiltonian::build(1.0, 1.0, 8);
    for (std::size_t n = 0; n < 8; ++n) CHECK(h.diag[n] == doctest::Approx(n + 0.5));
    for (double o : h.off) CHECK(o == 0.0);

    const auto g = tdho::TruncatedHamiltonian::build(2.0, 1.0, 8);
    const double rho = 0.5 * std::log(2.0);
    CHECK(g.off[0] == doctest::Approx(2.0 * std::sinh(2 * rho) * 0.5 * std::sqrt(2.0)));
    CHECK(g.off[6] == 0.0);
    CHECK_THROWS_AS((void)tdho::TruncatedHamiltonian::build(0.0, 1.0, 8), tdho::DomainError);
}

TEST_CASE("number states at omega_0 are stationary") {
    const auto d = tdho::discretize(Profile::constant(), 3.0, 300);
    for (std::size_t n : {0u, 1u, 4u}) {
        const auto res = tdho::integrate(d, FockState::number_state(n, n), 1e-3);
        CHECK(std::norm(res.state.amplitudes[n]) >= 1.0 - 1e-12);
        CHECK(res.norm_drift <= 1e-8);
    }
}

TEST_CASE("sudden jump at a quarter period matches the analytic squeezed vacuum") {
    // Half a period of omega_1 = 1.5 is where r peaks at ln 1.5, with phi = 0 or pi.
    const double w = 1.5, t = pi / (2 * w);
    const auto d = tdho::discretize(Profile::sudden_jump(w), t, 200);
    tdho::OracleOptions opt;
    opt.dim = 64;
    const auto res = tdho::integrate(d, FockState::number_state(0, 0), d.tau / 4, opt);
    const double r = std::log(w);
    const double f = std::max(tdho::fidelity(res.state, squeezed_vacuum(r, 0.0, 62)),
                              tdho::fidelity(res.state, squeezed_vacuum(r, pi, 62)));
    CHECK(f >= 0.9999);
    CHECK(res.dim >= 64);
}

TEST_CASE("relaxing pulse agrees with the algebraic propagator") {
    const auto d = tdho::discretize(Profile::relaxing_pulse(0.5 * pi), 30.0, 30000);
    const auto traj = tdho::evolve(d);
    tdho::OracleOptions opt;
    opt.dim = 128;
    const auto res = tdho::integrate(d, FockState::number_state(0, 0), d.tau / 4, opt);
    const auto alg = tdho::fock_amplitudes(traj.final_state, 126);
    CHECK(tdho::fidelity(alg, res.state) >= 0.999);
    CHECK(odd_population(res.state) <= 1e-24);
    CHECK(res.norm_drift <= 1e-8);
}

TEST_CASE("mixed-parity state keeps the relative phase of its sectors") {
    const auto d = tdho::discretize(Profile::parametric_resonance(1.04, 2.0), 20.0, 20000);
    const auto traj = tdho::evolve(d);
    const double h = std::sqrt(0.5);
    const FockState init({h, h});
    tdho::OracleOptions opt;
    opt.dim = 128;
    const auto res = tdho::integrate(d, init, d.tau, opt);
    const auto alg = tdho::apply_to_state(traj.final_state, init, 127);
    CHECK(tdho::fidelity(alg, res.state) >= 0.9999);
}

TEST_CASE("fidelity between squeezed vacua of opposite phase") {
    const auto a = squeezed_vacuum(0.3, 0.0, 200);
    const auto b = squeezed_vacuum(0.3, pi, 200);
    CHECK(tdho::fidelity(a, b) == doctest::Approx(0.84355068762180664158).epsilon(1e-13));
    CHECK(tdho::fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("energy is conserved under constant frequency") {
    const double w = 1.5;
    const auto d = tdho::discretize(Profile::sudden_jump(w), 5.0, 5000);
    const auto ham = tdho::TruncatedHamiltonian::build(w, 1.0, 128);
    tdho::OracleOptions opt;
    opt.dim = 128;
    const auto start = FockState::number_state(0, 127);
    const auto res = tdho::integrate(d, start, d.tau, opt);
    CHECK(ham.expectation(res.state) == doctest::Approx(ham.expectation(start)).epsilon(1e-9));
}

TEST_CASE("truncation leakage grows the basis or fails") {
    // omega_1 = 6 squeezes to r ~ ln 6 ~ 1.8 within a quarter period.
    const double w = 6.0;
    const auto d = tdho::discretize(Profile::sudden_jump(w), pi / (2 * w), 400);
    tdho::OracleOptions fixed;
    fixed.dim = 16;
    fixed.grow_on_leakage = false;
    CHECK_THROWS_AS((void)tdho::integrate(d, FockState::number_state(0, 0), d.tau, fixed), tdho::TruncationError);

    tdho::OracleOptions grow;
    grow.dim = 16;
    const auto res = tdho::integrate(d, FockState::number_state(0, 0), d.tau, grow);
    CHECK(res.dim > 16);
    CHECK(res.leakage <= grow.max_leakage);

    CHECK_THROWS_AS((void)tdho::integrate(d, FockState::number_state(0, 0), 2 * d.tau), tdho::DomainError);
}
