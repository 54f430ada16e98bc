#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdho/evolution.hpp"
#include "tdho/fock_oracle.hpp"
#include "tdho/profile.hpp"

namespace tdho::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kSimulationError = 3, kOracleMismatch = 4 };

class ConfigError : public Error {
public:
    using Error::Error;
};

enum class OutputFormat { csv, json };

struct ExperimentConfig {
    std::string preset;
    std::string profile = "constant";
    double omega0 = 1.0;
    double B = 3.0 * 3.14159265358979323846;
    double epsilon = 2.04;
    double omega_l = 1.04;
    double omega1 = 1.5;
    std::optional<double> hold_high;
    std::optional<double> hold_low;
    std::string table;
    double t_final = 10.0;
    std::size_t n_steps = 10000;  // 0 means auto (convergence study with tol)
    double tol = 1e-5;
    std::size_t n_start = 10000;
    double lambda = 0.0;
    VarianceScaling scaling = VarianceScaling::quarter;
    std::size_t record_every = 0;  // 0 means auto
    SamplingRule sampling = SamplingRule::right_endpoint;
    std::string output;  // empty writes to stdout
    OutputFormat format = OutputFormat::csv;
    bool oracle_check = false;
    bool fingerprint = false;
    double dt_sub = 0.0;  // 0 means min(tau, 1e-3)
    std::size_t oracle_dim = 256;

    /// Applies one key = value setting; keys match the long flag names.
    void set(const std::string& key, const std::string& value);
    /// Loads a preset's parameter set (fig1, fig2, fig3, fig4, fig5).
    void apply_preset(const std::string& name);

    [[nodiscard]] Profile build_profile() const;
};

/// Flat "key = value" lines; '#' comments, blank lines ignored.
[[nodiscard]] std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, bool fingerprint);
void write_trajectory_json(std::ostream& os, const Trajectory& traj, bool fingerprint);

/// Shortest round-trip decimal form of v.
[[nodiscard]] std::string format_double(double v);

/// Entry point shared by the tdho binary and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tdho::cli
