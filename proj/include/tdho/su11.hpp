#pragma once

// Disentangled su(1,1) propagator arithmetic.
//
// A single piecewise-constant segment of the oscillator evolves under
//   U = exp(L+ K+) exp(ln(Lc) Kc) exp(L- K-)
// and any product of such factors has the same ordered form, so the full
// propagator after j segments is tracked by three complex numbers.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "tdho/errors.hpp"

namespace tdho {

using Complex = std::complex<double>;

/// Coefficients of one segment's ordered-exponential propagator.
struct StepCoeffs {
    Complex lam_plus;
    Complex lam_c;
    Complex lam_minus;
    // Square root of lam_c on the branch continuous in tau (1 at tau = 0).
    Complex lam_c_root{1.0, 0.0};
    double omega_j = 0.0;
    double tau = 0.0;
    double rho_j = 0.0;
};

/// Composed coefficients (alpha, beta, gamma) after `steps_applied` segments.
/// The default-constructed value is the identity propagator.
struct PropagatorAccumulator {
    Complex alpha{0.0, 0.0};
    Complex beta{1.0, 0.0};
    Complex gamma{0.0, 0.0};
    // sqrt(beta) followed continuously through every composition, so that
    // beta^(n/2) is unambiguous for odd n.
    Complex beta_root{1.0, 0.0};
    std::size_t steps_applied = 0;

    static PropagatorAccumulator identity() { return {}; }

    /// | |alpha|^2 + |beta| - 1 |, zero for an exact unitary propagator.
    [[nodiscard]] double norm_defect() const;
};

/// |1 - alpha * L-| below this is treated as a degenerate composition.
inline constexpr double kSingularDenominator = 1e-14;

/// Segment coefficients for frequency omega_j held for tau, measured against
/// the reference frequency omega_0 (unit mass).
[[nodiscard]] StepCoeffs step_coeffs(double omega_j, double omega_0, double tau);

/// Ladder of segment coefficients; one entry per frequency sample.
[[nodiscard]] std::vector<StepCoeffs> step_ladder(std::span<const double> omegas, double omega_0,
                                                  double tau);

/// Appends one segment to the accumulated propagator (the segment acts last).
[[nodiscard]] PropagatorAccumulator compose(const PropagatorAccumulator& acc, const StepCoeffs& step);

/// Folds compose over a whole ladder starting from the identity.
[[nodiscard]] PropagatorAccumulator compose_all(std::span<const StepCoeffs> steps);

/// Reinterprets an accumulator as a single step, for group-closure checks.
[[nodiscard]] StepCoeffs as_step(const PropagatorAccumulator& acc);

/// alpha evaluated as the nested continued fraction, innermost term first.
/// Cross-check only: fails with NotEvaluableError whenever a partial alpha
/// vanishes, which the recurrence handles without trouble.
[[nodiscard]] Complex alpha_via_gcf(std::span<const StepCoeffs> steps);

}  // namespace tdho
