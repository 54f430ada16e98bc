#pragma once

// Folding a discretized profile into a propagator and reading off the
// squeezed-state observables along the way.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tdho/profile.hpp"
#include "tdho/su11.hpp"

namespace tdho {

/// Quadrature normalization. `half` puts the coherent-state variance at 1/2,
/// `quarter` (the scaled quadrature) at 1/4.
enum class VarianceScaling { half, quarter };

[[nodiscard]] constexpr double scale_factor(VarianceScaling s) { return s == VarianceScaling::half ? 0.5 : 0.25; }

struct SqueezeObservables {
    double t = 0.0;
    double omega = 0.0;  // frequency of the segment that ends at t
    Complex alpha{0.0, 0.0};
    double r = 0.0;
    double vartheta = 0.0;  // arg(alpha)
    double phi = 0.0;       // squeezing phase, vartheta + pi wrapped to (-pi, pi]
    double chi = 0.0;       // arg(beta)
    double variance = 0.0;
    double mean_n = 0.0;
    double norm_defect = 0.0;
};

/// r, phases, quadrature variance at angle lambda and mean photon number.
/// Throws InvalidAccumulatorError when |alpha| >= 1.
[[nodiscard]] SqueezeObservables observables_from_accumulator(const PropagatorAccumulator& acc, double t,
                                                              double lambda, VarianceScaling scaling);

/// s [e^{2r} sin^2(lambda - phi/2) + e^{-2r} cos^2(lambda - phi/2)]
[[nodiscard]] double quadrature_variance(double r, double phi, double lambda, VarianceScaling scaling);

struct EvolveOptions {
    std::size_t record_every = 0;  // 0 selects max(1, N / 5000)
    double lambda = 0.0;
    VarianceScaling scaling = VarianceScaling::quarter;
};

[[nodiscard]] std::size_t auto_record_every(std::size_t n_steps);

struct Trajectory {
    std::string profile_descriptor;
    std::vector<SqueezeObservables> records;
    std::size_t n_steps_used = 0;
    std::size_t record_every = 0;
    double tau = 0.0;
    bool converged = false;
    PropagatorAccumulator final_state;
};

/// Composes every step of the ladder from the identity, emitting observables
/// after each multiple of record_every steps and after the last step.
/// Singular compositions propagate as SingularCompositionError carrying j and omega_j.
[[nodiscard]] Trajectory evolve(const DiscretizedProfile& profile, const EvolveOptions& options = {},
                                std::string descriptor = {});

/// Same as running evolve on each ladder; equal-length ladders are folded
/// kLanes at a time through the SIMD batch kernel. Records agree with evolve to
/// rounding (the batch kernel uses the textbook complex division).
[[nodiscard]] std::vector<Trajectory> evolve_many(std::span<const DiscretizedProfile> profiles,
                                                  const EvolveOptions& options = {},
                                                  std::span<const std::string> descriptors = {});

/// Fock-basis amplitudes c_0 ... c_{n_max}.
struct FockState {
    std::vector<Complex> amplitudes;

    FockState() = default;
    explicit FockState(std::vector<Complex> a) : amplitudes(std::move(a)) {}

    static FockState number_state(std::size_t n, std::size_t n_max);
    [[nodiscard]] std::size_t n_max() const { return amplitudes.empty() ? 0 : amplitudes.size() - 1; }
    [[nodiscard]] double norm_squared() const;
};

/// Squeezed vacuum produced by the accumulator from |0>, overall phase removed:
/// c_{2n} = |beta|^{1/4} sqrt((2n)!)/n! (alpha/2)^n, odd amplitudes zero.
/// Requires even n_max and |alpha| < 1.
[[nodiscard]] FockState fock_amplitudes(const PropagatorAccumulator& acc, std::size_t n_max);

/// Leakage above which apply_to_state refuses the truncation.
inline constexpr double kMaxStateLeakage = 1e-6;

/// exp(alpha K+) exp(ln(beta) Kc) exp(gamma K-) acting on `initial`, truncated at
/// n_max. The returned norm deficit is the truncation leakage; more than
/// kMaxStateLeakage throws TruncationError.
[[nodiscard]] FockState apply_to_state(const PropagatorAccumulator& acc, const FockState& initial,
                                       std::size_t n_max);

struct ConvergeOptions {
    std::size_t cap = std::size_t{1} << 24;
    SamplingRule sampling = SamplingRule::right_endpoint;
    double lambda = 0.0;
    VarianceScaling scaling = VarianceScaling::quarter;
    std::size_t grid_points = 1000;  // approximate size of the shared record grid
};

struct ConvergenceStep {
    std::size_t n_steps = 0;
    double max_delta_r = 0.0;  // against the previous N; NaN for the first run
};

struct ConvergenceResult {
    Trajectory trajectory;
    std::vector<ConvergenceStep> history;
    bool converged = false;
    std::string warning;
};

/// Doubles N from n_start until max_t |r_2N(t) - r_N(t)| < tol on a shared
/// record grid, or until the next N would exceed the cap.
[[nodiscard]] ConvergenceResult auto_converge(const Profile& p, double t_final, double tol, std::size_t n_start,
                                              const ConvergeOptions& options = {});

}  // namespace tdho
