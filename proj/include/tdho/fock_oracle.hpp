#pragma once

// Brute-force reference: Runge-Kutta integration of i dC/dt = H(t) C in a
// truncated Fock basis, independent of the algebraic propagator.

#include <cstddef>
#include <vector>

#include "tdho/evolution.hpp"
#include "tdho/profile.hpp"

namespace tdho {

/// H = 2 omega cosh(2 rho) Kc + omega sinh(2 rho) (K+ + K-) on levels 0 .. dim-1.
/// Real symmetric; couples n to n and n +- 2 only.
struct TruncatedHamiltonian {
    std::size_t dim = 0;
    double omega = 0.0;
    double rho = 0.0;
    std::vector<double> diag;  // <n|H|n>
    std::vector<double> off;   // <n|H|n+2> = <n+2|H|n>, size dim (trailing two unused)

    static TruncatedHamiltonian build(double omega, double omega_0, std::size_t dim);

    [[nodiscard]] std::vector<Complex> apply(const std::vector<Complex>& x) const;
    [[nodiscard]] double expectation(const FockState& state) const;
};

struct OracleOptions {
    std::size_t dim = 256;
    std::size_t max_dim = 4096;
    bool grow_on_leakage = true;
    double max_leakage = 1e-6;
};

struct OracleResult {
    FockState state;          // normalized final state
    double leakage = 0.0;     // largest population seen in the guard band
    double norm_drift = 0.0;  // | ||C||^2 - 1 | before the final normalization
    std::size_t dim = 0;
    std::size_t substeps = 0;
};

/// Top levels whose population is reported as truncation leakage.
[[nodiscard]] std::size_t guard_band(std::size_t dim);

/// Classical RK4 with a fixed substep no larger than dt_sub (shortened further
/// when the basis is large enough to make RK4 unstable), H held constant on
/// each ladder segment. Doubles the dimension on leakage when allowed, otherwise
/// throws TruncationError with the measured leakage.
[[nodiscard]] OracleResult integrate(const DiscretizedProfile& profile, const FockState& initial, double dt_sub,
                                     const OracleOptions& options = {});

/// |<a|b>|^2 for normalized states; missing components count as zero.
[[nodiscard]] double fidelity(const FockState& a, const FockState& b);

}  // namespace tdho
