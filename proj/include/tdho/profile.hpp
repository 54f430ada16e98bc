#pragma once

// Frequency modulations omega(t) and their piecewise-constant ladders.
// Every profile equals omega_0 for t <= 0.

#include <cstddef>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "tdho/errors.hpp"

namespace tdho {

struct ConstantProfile {};

/// omega_0 [1 + (omega_0 t / 2) exp(-omega_0 t / B)]
struct RelaxingPulse {
    double B = 0.0;
};

/// 1/2 [(omega_0 + omega_l) + (omega_0 - omega_l) cos(epsilon omega_0 t)]
struct ParametricResonance {
    double omega_l = 0.0;
    double epsilon = 0.0;
};

/// Square wave: omega_1 for hold_high, then omega_0 for hold_low, repeating.
/// Intervals are left-open and right-closed, starting with omega_1 at t = 0+.
struct JanszkyAdam {
    double omega_1 = 0.0;
    double hold_high = 0.0;
    double hold_low = 0.0;
};

/// omega_1 for every t > 0.
struct SuddenJump {
    double omega_1 = 0.0;
};

/// Linear interpolation over (t, omega) pairs with strictly increasing t.
struct TabulatedProfile {
    std::vector<double> t;
    std::vector<double> omega;
};

enum class ProfileKind { constant, relaxing_pulse, parametric_resonance, janszky_adam, sudden_jump, tabulated };

class Profile {
public:
    using Params = std::variant<ConstantProfile, RelaxingPulse, ParametricResonance, JanszkyAdam,
                                SuddenJump, TabulatedProfile>;

    Profile() = default;
    Profile(Params params, double omega_0);

    static Profile constant(double omega_0 = 1.0);
    static Profile relaxing_pulse(double B, double omega_0 = 1.0);
    static Profile parametric_resonance(double omega_l, double epsilon, double omega_0 = 1.0);
    /// Quarter-period holds at each frequency: pi/(2 omega_1) high, pi/(2 omega_0) low.
    static Profile janszky_adam(double omega_1, double omega_0 = 1.0);
    static Profile janszky_adam(double omega_1, double hold_high, double hold_low, double omega_0);
    static Profile sudden_jump(double omega_1, double omega_0 = 1.0);
    static Profile tabulated(std::vector<double> t, std::vector<double> omega, double omega_0 = 1.0);

    [[nodiscard]] ProfileKind kind() const;
    [[nodiscard]] double omega_0() const { return omega_0_; }
    [[nodiscard]] const Params& params() const { return params_; }

    /// Natural modulation period, or 0 for non-periodic kinds.
    [[nodiscard]] double modulation_period() const;

    /// Short human-readable description, e.g. "parametric_resonance(omega_l=1.04,epsilon=2.04)".
    [[nodiscard]] std::string describe() const;

private:
    Params params_{ConstantProfile{}};
    double omega_0_ = 1.0;
};

[[nodiscard]] std::string to_string(ProfileKind kind);

/// omega(t). Throws RangeError for tabulated profiles queried past the table.
[[nodiscard]] double eval_profile(const Profile& p, double t);

enum class SamplingRule { right_endpoint, midpoint };

struct DiscretizedProfile {
    double omega_0 = 1.0;
    double tau = 0.0;
    double t_final = 0.0;
    std::vector<double> samples;  // samples[j-1] = omega on ((j-1) tau, j tau]

    [[nodiscard]] std::size_t n_steps() const { return samples.size(); }
};

/// Piecewise-constant ladder with tau = t_final / n_steps. Right-endpoint rule
/// samples omega(j tau); midpoint samples omega((j - 1/2) tau).
[[nodiscard]] DiscretizedProfile discretize(const Profile& p, double t_final, std::size_t n_steps,
                                            SamplingRule rule = SamplingRule::right_endpoint);

/// Reads a two-column (t, omega) text table; '#' starts a comment.
[[nodiscard]] TabulatedProfile read_tabulated(const std::filesystem::path& path);
[[nodiscard]] TabulatedProfile parse_tabulated(const std::string& text);

}  // namespace tdho
