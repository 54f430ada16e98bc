#include "tdho/fock_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tdho/simd/kernels.hpp"

namespace tdho {

TruncatedHamiltonian TruncatedHamiltonian::build(double omega, double omega_0, std::size_t dim) {
    if (!(omega > 0.0) || !(omega_0 > 0.0)) throw DomainError("TruncatedHamiltonian: frequencies must be positive");
    if (dim < 1) throw DomainError("TruncatedHamiltonian: empty basis");
    TruncatedHamiltonian h;
    h.dim = dim;
    h.omega = omega;
    h.rho = 0.5 * std::log(omega / omega_0);
    h.diag.resize(dim);
    h.off.assign(dim, 0.0);
    const double ch = std::cosh(2.0 * h.rho);
    const double sh = std::sinh(2.0 * h.rho);
    for (std::size_t n = 0; n < dim; ++n) {
        const double x = static_cast<double>(n);
        h.diag[n] = 2.0 * omega * ch * (0.5 * (x + 0.5));
        if (n + 2 < dim) h.off[n] = omega * sh * (0.5 * std::sqrt((x + 1.0) * (x + 2.0)));
    }
    return h;
}

std::vector<Complex> TruncatedHamiltonian::apply(const std::vector<Complex>& x) const {
    std::vector<Complex> y(dim);
    for (std::size_t n = 0; n < dim; ++n) {
        Complex v = diag[n] * x[n];
        if (n + 2 < dim) v += off[n] * x[n + 2];
        if (n >= 2) v += off[n - 2] * x[n - 2];
        y[n] = v;
    }
    return y;
}

double TruncatedHamiltonian::expectation(const FockState& state) const {
    std::vector<Complex> x(dim);
    std::copy_n(state.amplitudes.begin(), std::min(dim, state.amplitudes.size()), x.begin());
    const auto y = apply(x);
    Complex s{};
    for (std::size_t n = 0; n < dim; ++n) s += std::conj(x[n]) * y[n];
    return s.real();
}

std::size_t guard_band(std::size_t dim) { return std::min(dim, std::max<std::size_t>(8, dim / 16)); }

namespace {

double guard_population(const std::vector<Complex>& x) {
    const std::size_t g = guard_band(x.size());
    double s = 0.0;
    for (std::size_t n = x.size() - g; n < x.size(); ++n) s += std::norm(x[n]);
    return s;
}

OracleResult integrate_fixed(const DiscretizedProfile& profile, const FockState& initial, double dt_sub,
                             std::size_t dim) {
    const auto& k = simd::active_kernels();
    std::vector<Complex> x(dim), k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    std::copy(initial.amplitudes.begin(), initial.amplitudes.end(), x.begin());

    // Keep h times the Gershgorin bound of H inside RK4's stability interval on
    // the imaginary axis (|h lambda| < 2.83); cosh(2 rho) + |sinh(2 rho)| = e^{2|rho|}.
    double spectral = 0.0;
    for (double w : profile.samples) {
        const double e2 = std::max(w / profile.omega_0, profile.omega_0 / w);
        spectral = std::max(spectral, w * e2 * static_cast<double>(dim + 1));
    }
    dt_sub = std::min(dt_sub, 2.0 / spectral);
    const auto m = static_cast<std::size_t>(std::ceil(profile.tau / dt_sub - 1e-9));
    const std::size_t substeps = std::max<std::size_t>(1, m);
    const double h = profile.tau / static_cast<double>(substeps);

    OracleResult res;
    res.dim = dim;
    res.leakage = guard_population(x);
    TruncatedHamiltonian ham;
    double last_omega = -1.0;
    for (double w : profile.samples) {
        if (w != last_omega) {
            ham = TruncatedHamiltonian::build(w, profile.omega_0, dim);
            last_omega = w;
        }
        const double* d = ham.diag.data();
        const double* o = ham.off.data();
        for (std::size_t s = 0; s < substeps; ++s) {
            k.hamiltonian_deriv(d, o, x.data(), k1.data(), dim);
            k.axpy(tmp.data(), x.data(), 0.5 * h, k1.data(), dim);
            k.hamiltonian_deriv(d, o, tmp.data(), k2.data(), dim);
            k.axpy(tmp.data(), x.data(), 0.5 * h, k2.data(), dim);
            k.hamiltonian_deriv(d, o, tmp.data(), k3.data(), dim);
            k.axpy(tmp.data(), x.data(), h, k3.data(), dim);
            k.hamiltonian_deriv(d, o, tmp.data(), k4.data(), dim);
            k.rk4_combine(x.data(), k1.data(), k2.data(), k3.data(), k4.data(), h, dim);
        }
        res.substeps += substeps;
        res.leakage = std::max(res.leakage, guard_population(x));
    }

    double norm2 = 0.0;
    for (const auto& c : x) norm2 += std::norm(c);
    res.norm_drift = std::abs(norm2 - 1.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& c : x) c *= inv;
    res.state = FockState(std::move(x));
    return res;
}

}  // namespace

OracleResult integrate(const DiscretizedProfile& profile, const FockState& initial, double dt_sub,
                       const OracleOptions& options) {
    if (!(dt_sub > 0.0) || dt_sub > profile.tau * (1.0 + 1e-12)) {
        throw DomainError("integrate: dt_sub must be positive and no larger than the ladder step");
    }
    if (initial.amplitudes.empty()) throw DomainError("integrate: empty initial state");

    std::size_t dim = std::max(options.dim, initial.amplitudes.size());
    while (true) {
        std::vector<Complex> embedded(dim);
        std::copy(initial.amplitudes.begin(), initial.amplitudes.end(), embedded.begin());
        const double initial_leak = guard_population(embedded);
        if (initial_leak < 1e-10) {
            OracleResult res = integrate_fixed(profile, initial, dt_sub, dim);
            if (res.leakage <= options.max_leakage) return res;
            if (!options.grow_on_leakage || 2 * dim > options.max_dim) {
                std::ostringstream os;
                os << "integrate: truncation leakage " << res.leakage << " at dim = " << dim;
                throw TruncationError(os.str(), res.leakage);
            }
        } else if (!options.grow_on_leakage || 2 * dim > options.max_dim) {
            std::ostringstream os;
            os << "integrate: initial state populates the top levels of dim = " << dim;
            throw TruncationError(os.str(), initial_leak);
        }
        dim *= 2;
    }
}

double fidelity(const FockState& a, const FockState& b) {
    const std::size_t n = std::min(a.amplitudes.size(), b.amplitudes.size());
    Complex s{};
    for (std::size_t i = 0; i < n; ++i) s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
    return std::clamp(std::norm(s), 0.0, 1.0);
}

}  // namespace tdho
