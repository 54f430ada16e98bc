#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "tdho/analysis.hpp"

namespace tdho::cli {

namespace {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string normalize_key(std::string key) {
    key = trim(std::move(key));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

// Accepts plain decimals and multiples of pi: "3pi", "0.5*pi", "pi".
double parse_real(const std::string& key, const std::string& text) {
    std::string s = trim(text);
    double scale = 1.0;
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
        scale = std::numbers::pi;
        s.resize(s.size() - 2);
        if (!s.empty() && s.back() == '*') s.pop_back();
        if (s.empty()) return scale;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError("invalid number for " + key + ": '" + text + "'");
    }
    return v * scale;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("invalid count for " + key + ": '" + text + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw ConfigError("invalid flag value for " + key + ": '" + text + "'");
}

double positive(const std::string& key, double v) {
    if (!(v > 0.0)) throw ConfigError(key + " must be positive");
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

KeyValues parse_config_text(const std::string& text) {
    KeyValues out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = normalize_key(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        out.emplace_back(std::move(key), trim(line.substr(eq + 1)));
    }
    return out;
}

void ExperimentConfig::set(const std::string& raw_key, const std::string& value) {
    const std::string key = normalize_key(raw_key);
    if (key == "preset") {
        apply_preset(trim(value));
    } else if (key == "profile") {
        std::string v = trim(value);
        std::replace(v.begin(), v.end(), '-', '_');
        static const char* kinds[] = {"constant",     "relaxing_pulse", "parametric_resonance",
                                      "janszky_adam", "sudden_jump",    "tabulated"};
        if (std::find(std::begin(kinds), std::end(kinds), v) == std::end(kinds)) {
            throw ConfigError("unknown profile '" + value + "'");
        }
        profile = v;
    } else if (key == "omega0") {
        omega0 = positive(key, parse_real(key, value));
    } else if (key == "B") {
        B = positive(key, parse_real(key, value));
    } else if (key == "epsilon") {
        epsilon = positive(key, parse_real(key, value));
    } else if (key == "omega-l") {
        omega_l = positive(key, parse_real(key, value));
    } else if (key == "omega1") {
        omega1 = positive(key, parse_real(key, value));
    } else if (key == "hold-high") {
        hold_high = positive(key, parse_real(key, value));
    } else if (key == "hold-low") {
        hold_low = positive(key, parse_real(key, value));
    } else if (key == "table") {
        table = trim(value);
    } else if (key == "t-final") {
        t_final = positive(key, parse_real(key, value));
    } else if (key == "n-steps") {
        if (trim(value) == "auto") {
            n_steps = 0;
        } else {
            n_steps = parse_count(key, value);
            if (n_steps == 0) throw ConfigError("n-steps must be at least 1 or 'auto'");
        }
    } else if (key == "tol") {
        tol = positive(key, parse_real(key, value));
    } else if (key == "n-start") {
        n_start = parse_count(key, value);
        if (n_start < 100) throw ConfigError("n-start must be at least 100");
    } else if (key == "lambda") {
        lambda = parse_real(key, value);
    } else if (key == "scaling") {
        const std::string v = trim(value);
        if (v == "half") scaling = VarianceScaling::half;
        else if (v == "quarter") scaling = VarianceScaling::quarter;
        else throw ConfigError("scaling must be half or quarter");
    } else if (key == "record-every") {
        record_every = trim(value) == "auto" ? 0 : parse_count(key, value);
    } else if (key == "sampling") {
        const std::string v = trim(value);
        if (v == "right" || v == "right_endpoint" || v == "right-endpoint") sampling = SamplingRule::right_endpoint;
        else if (v == "midpoint") sampling = SamplingRule::midpoint;
        else throw ConfigError("sampling must be right or midpoint");
    } else if (key == "output") {
        output = trim(value);
    } else if (key == "format") {
        const std::string v = trim(value);
        if (v == "csv") format = OutputFormat::csv;
        else if (v == "json") format = OutputFormat::json;
        else throw ConfigError("format must be csv or json");
    } else if (key == "oracle-check") {
        oracle_check = parse_bool(key, value);
    } else if (key == "fingerprint") {
        fingerprint = parse_bool(key, value);
    } else if (key == "dt-sub") {
        dt_sub = positive(key, parse_real(key, value));
    } else if (key == "oracle-dim") {
        oracle_dim = parse_count(key, value);
        if (oracle_dim < 16) throw ConfigError("oracle-dim must be at least 16");
    } else {
        throw ConfigError("unknown config key '" + raw_key + "'");
    }
}

void ExperimentConfig::apply_preset(const std::string& name) {
    constexpr double pi = std::numbers::pi;
    if (name == "fig1") {
        profile = "relaxing_pulse";
        B = 3.0 * pi;
        t_final = 150.0;
        n_steps = 150000;
    } else if (name == "fig2" || name == "fig3") {
        profile = "parametric_resonance";
        omega_l = 1.04;
        epsilon = 2.04;
        t_final = 120.0;
        n_steps = 150000;
        if (name == "fig3") fingerprint = true;
    } else if (name == "fig4") {
        profile = "janszky_adam";
        omega1 = 1.5;
        hold_high.reset();
        hold_low.reset();
        t_final = 12.0;
        n_steps = 120000;
    } else if (name == "fig5") {
        profile = "janszky_adam";
        omega1 = 1.04;
        hold_high.reset();
        hold_low.reset();
        t_final = 120.0;
        n_steps = 150000;
    } else {
        throw ConfigError("unknown preset '" + name + "' (fig1, fig2, fig3, fig4, fig5)");
    }
    preset = name;
}

Profile ExperimentConfig::build_profile() const {
    if (profile == "constant") return Profile::constant(omega0);
    if (profile == "relaxing_pulse") return Profile::relaxing_pulse(B, omega0);
    if (profile == "parametric_resonance") return Profile::parametric_resonance(omega_l, epsilon, omega0);
    if (profile == "sudden_jump") return Profile::sudden_jump(omega1, omega0);
    if (profile == "janszky_adam") {
        if (!hold_high && !hold_low) return Profile::janszky_adam(omega1, omega0);
        const double hh = hold_high.value_or(std::numbers::pi / (2.0 * omega1));
        const double hl = hold_low.value_or(std::numbers::pi / (2.0 * omega0));
        return Profile::janszky_adam(omega1, hh, hl, omega0);
    }
    if (profile == "tabulated") {
        if (table.empty()) throw ConfigError("tabulated profile needs table = <file>");
        auto tab = read_tabulated(table);
        return Profile::tabulated(std::move(tab.t), std::move(tab.omega), omega0);
    }
    throw ConfigError("unknown profile '" + profile + "'");
}

// ---------------------------------------------------------------------------
// Writers

namespace {

const char* const kColumns[] = {"t",        "omega",    "re_alpha", "im_alpha", "abs_alpha",  "r",
                                "vartheta", "phi",      "variance", "mean_n",   "norm_defect"};

std::vector<double> row_values(const SqueezeObservables& o, bool fingerprint) {
    std::vector<double> v{o.t,        o.omega, o.alpha.real(), o.alpha.imag(), std::abs(o.alpha), o.r,
                          o.vartheta, o.phi,   o.variance,     o.mean_n,       o.norm_defect};
    if (fingerprint) {
        v.push_back(o.r * std::cos(o.phi));
        v.push_back(o.r * std::sin(o.phi));
    }
    return v;
}

std::vector<std::string> column_names(bool fingerprint) {
    std::vector<std::string> names(std::begin(kColumns), std::end(kColumns));
    if (fingerprint) {
        names.emplace_back("re_z");
        names.emplace_back("im_z");
    }
    return names;
}

nlohmann::ordered_json records_json(const Trajectory& traj, bool fingerprint) {
    const auto names = column_names(fingerprint);
    auto arr = nlohmann::ordered_json::array();
    for (const auto& rec : traj.records) {
        const auto vals = row_values(rec, fingerprint);
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < names.size(); ++i) obj[names[i]] = vals[i];
        arr.push_back(std::move(obj));
    }
    return arr;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, bool fingerprint) {
    const auto names = column_names(fingerprint);
    for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
    os << '\n';
    for (const auto& rec : traj.records) {
        const auto vals = row_values(rec, fingerprint);
        for (std::size_t i = 0; i < vals.size(); ++i) os << (i ? "," : "") << format_double(vals[i]);
        os << '\n';
    }
}

void write_trajectory_json(std::ostream& os, const Trajectory& traj, bool fingerprint) {
    os << records_json(traj, fingerprint).dump(1) << '\n';
}

// ---------------------------------------------------------------------------
// Commands

namespace {

constexpr double kMaxNormDefect = 1e-10;
constexpr double kOracleFidelity = 0.999;

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

// Runs `writer` against the configured output file, or `fallback` when none is set.
template <class F>
void with_output(const std::string& path, std::ostream& fallback, F&& writer) {
    if (path.empty()) {
        writer(fallback);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file " + path);
    writer(f);
    if (!f) throw Error("failed writing " + path);
}

void write_trajectory(std::ostream& os, const Trajectory& traj, const ExperimentConfig& cfg) {
    if (cfg.format == OutputFormat::csv) write_trajectory_csv(os, traj, cfg.fingerprint);
    else write_trajectory_json(os, traj, cfg.fingerprint);
}

double max_norm_defect(const Trajectory& traj) {
    double m = 0.0;
    for (const auto& r : traj.records) m = std::max(m, r.norm_defect);
    return m;
}

EvolveOptions evolve_options(const ExperimentConfig& cfg) {
    EvolveOptions eo;
    eo.record_every = cfg.record_every;
    eo.lambda = cfg.lambda;
    eo.scaling = cfg.scaling;
    return eo;
}

ConvergeOptions converge_options(const ExperimentConfig& cfg) {
    ConvergeOptions co;
    co.sampling = cfg.sampling;
    co.lambda = cfg.lambda;
    co.scaling = cfg.scaling;
    return co;
}

struct RunResult {
    Trajectory traj;
    DiscretizedProfile ladder;
};

RunResult run_trajectory(const ExperimentConfig& cfg, const Profile& p, std::ostream& err) {
    RunResult res;
    if (cfg.n_steps == 0) {
        auto conv = auto_converge(p, cfg.t_final, cfg.tol, cfg.n_start, converge_options(cfg));
        if (!conv.converged) err << "warning: " << conv.warning << '\n';
        res.traj = std::move(conv.trajectory);
        res.ladder = discretize(p, cfg.t_final, res.traj.n_steps_used, cfg.sampling);
    } else {
        res.ladder = discretize(p, cfg.t_final, cfg.n_steps, cfg.sampling);
        res.traj = evolve(res.ladder, evolve_options(cfg), p.describe());
    }
    return res;
}

int check_norm(const Trajectory& traj, std::ostream& err) {
    const double d = max_norm_defect(traj);
    if (d > kMaxNormDefect) {
        err << "error: norm defect " << format_double(d) << " exceeds " << kMaxNormDefect << " ("
            << traj.profile_descriptor << ")\n";
        return kSimulationError;
    }
    return kOk;
}

int oracle_check(const ExperimentConfig& cfg, const RunResult& run, std::ostream& err) {
    const double dt = cfg.dt_sub > 0.0 ? std::min(cfg.dt_sub, run.ladder.tau) : std::min(run.ladder.tau, 1e-3);
    OracleOptions oo;
    oo.dim = cfg.oracle_dim;
    const auto vac = FockState::number_state(0, 0);
    const auto oracle = integrate(run.ladder, vac, dt, oo);
    const std::size_t n_max = (oracle.dim - 1) & ~std::size_t{1};
    const auto algebraic = fock_amplitudes(run.traj.final_state, n_max);
    const double f = fidelity(algebraic, oracle.state);
    err << "oracle: dim=" << oracle.dim << " substeps=" << oracle.substeps << " fidelity=" << format_double(f)
        << " leakage=" << format_double(oracle.leakage) << " norm_drift=" << format_double(oracle.norm_drift)
        << '\n';
    if (!(f >= kOracleFidelity)) {
        err << "error: oracle fidelity " << format_double(f) << " below " << kOracleFidelity << '\n';
        return kOracleMismatch;
    }
    return kOk;
}

// Linear fit of the period-averaged r on [20, t_final] for resonance runs.
void growth_diagnostic(const Profile& p, const Trajectory& traj, double t_final, std::ostream& err) {
    constexpr double t_from = 20.0;
    const double period = p.modulation_period();
    if (p.kind() != ProfileKind::parametric_resonance || t_final < t_from + period) return;
    const auto fit = fit_line(period_average(r_series(traj), period), t_from, t_final);
    err << "diagnostic: period-averaged r on [" << t_from << ", " << format_double(t_final)
        << "]: slope=" << format_double(fit.slope) << " r_squared=" << format_double(fit.r_squared)
        << (fit.r_squared >= 0.99 && fit.slope > 0 ? " linear growth" : " no linear growth") << '\n';
}

int cmd_simulate(const ExperimentConfig& cfg, const Profile& p, Streams s) {
    const auto run = run_trajectory(cfg, p, s.err);
    with_output(cfg.output, s.out, [&](std::ostream& os) { write_trajectory(os, run.traj, cfg); });
    if (int rc = check_norm(run.traj, s.err); rc != kOk) return rc;
    growth_diagnostic(p, run.traj, cfg.t_final, s.err);
    if (cfg.oracle_check) return oracle_check(cfg, run, s.err);
    return kOk;
}

struct SweepSpec {
    std::string param;
    std::vector<std::string> values;
};

SweepSpec default_sweep(const ExperimentConfig& cfg) {
    if (cfg.preset == "fig1") return {"B", {"0.5pi", "3pi", "5pi"}};
    if (cfg.preset == "fig2" || cfg.preset == "fig3") return {"epsilon", {"1.96", "2.0", "2.04"}};
    return {};
}

std::string member_path(const std::string& output, const std::string& param, std::size_t k) {
    const auto slash = output.find_last_of('/');
    const auto dot = output.find_last_of('.');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    const std::string stem = has_ext ? output.substr(0, dot) : output;
    const std::string ext = has_ext ? output.substr(dot) : "";
    return stem + "_" + param + std::to_string(k) + ext;
}

int cmd_sweep(const ExperimentConfig& base, SweepSpec spec, Streams s) {
    if (spec.param.empty() && spec.values.empty()) spec = default_sweep(base);
    if (spec.param.empty() || spec.values.empty()) {
        throw ConfigError("sweep needs --param and --values (or a preset with a default sweep)");
    }
    if (base.n_steps == 0) throw ConfigError("sweep needs a fixed n-steps");

    std::vector<ExperimentConfig> cfgs;
    std::vector<DiscretizedProfile> ladders;
    std::vector<std::string> names;
    for (const auto& v : spec.values) {
        ExperimentConfig c = base;
        c.set(spec.param, v);
        cfgs.push_back(c);
    }
    std::vector<Profile> profiles;
    for (const auto& c : cfgs) profiles.push_back(c.build_profile());

    // Past this point failures are simulation errors.
    try {
        for (const auto& p : profiles) {
            ladders.push_back(discretize(p, base.t_final, base.n_steps, base.sampling));
            names.push_back(p.describe());
        }
        const auto trajs = evolve_many(ladders, evolve_options(base), names);

        if (base.output.empty()) {
            if (base.format == OutputFormat::json) {
                auto arr = nlohmann::ordered_json::array();
                for (std::size_t k = 0; k < trajs.size(); ++k) {
                    nlohmann::ordered_json m;
                    m["param"] = spec.param;
                    m["value"] = parse_real(spec.param, spec.values[k]);
                    m["profile"] = trajs[k].profile_descriptor;
                    m["records"] = records_json(trajs[k], base.fingerprint);
                    arr.push_back(std::move(m));
                }
                s.out << arr.dump(1) << '\n';
            } else {
                for (std::size_t k = 0; k < trajs.size(); ++k) {
                    s.out << "# " << spec.param << "=" << spec.values[k] << " " << trajs[k].profile_descriptor
                          << '\n';
                    write_trajectory_csv(s.out, trajs[k], base.fingerprint);
                }
            }
        } else {
            for (std::size_t k = 0; k < trajs.size(); ++k) {
                const auto path = member_path(base.output, spec.param, k);
                with_output(path, s.out, [&](std::ostream& os) { write_trajectory(os, trajs[k], base); });
                s.out << k << ' ' << spec.param << '=' << spec.values[k] << ' ' << path << '\n';
            }
        }
        int rc = kOk;
        for (const auto& t : trajs) rc = std::max(rc, check_norm(t, s.err));
        return rc;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        s.err << "error: " << e.what() << '\n';
        return kSimulationError;
    }
}

int cmd_converge(const ExperimentConfig& cfg, const Profile& p, const std::string& trajectory_path, Streams s) {
    const auto conv = auto_converge(p, cfg.t_final, cfg.tol, cfg.n_start, converge_options(cfg));
    if (!conv.converged) s.err << "warning: " << conv.warning << '\n';
    with_output(cfg.output, s.out, [&](std::ostream& os) {
        if (cfg.format == OutputFormat::json) {
            nlohmann::ordered_json j;
            j["profile"] = conv.trajectory.profile_descriptor;
            j["tol"] = cfg.tol;
            auto runs = nlohmann::ordered_json::array();
            for (const auto& h : conv.history) {
                nlohmann::ordered_json r;
                r["n_steps"] = h.n_steps;
                if (std::isnan(h.max_delta_r)) r["max_delta_r"] = nullptr;
                else r["max_delta_r"] = h.max_delta_r;
                runs.push_back(std::move(r));
            }
            j["runs"] = std::move(runs);
            j["final_n"] = conv.trajectory.n_steps_used;
            j["converged"] = conv.converged;
            os << j.dump(1) << '\n';
        } else {
            os << "n_steps,max_delta_r\n";
            for (const auto& h : conv.history) {
                os << h.n_steps << ',' << (std::isnan(h.max_delta_r) ? "" : format_double(h.max_delta_r)) << '\n';
            }
            os << "# final_n=" << conv.trajectory.n_steps_used << " converged=" << (conv.converged ? "true" : "false")
               << '\n';
        }
    });
    if (!trajectory_path.empty()) {
        with_output(trajectory_path, s.out, [&](std::ostream& os) { write_trajectory(os, conv.trajectory, cfg); });
    }
    return check_norm(conv.trajectory, s.err);
}

std::string compare_verdict(const Series& a, const Series& b) {
    bool identical = a.v.size() == b.v.size();
    for (std::size_t i = 0; identical && i < a.v.size(); ++i) identical = a.v[i] == b.v[i];
    if (identical) return "identical";
    const std::size_t n = std::min(a.v.size(), b.v.size());
    auto dominates = [&](const Series& x, const Series& y, std::size_t from) {
        for (std::size_t i = from; i < n; ++i) {
            if (x.v[i] < y.v[i]) return false;
        }
        return n > from;
    };
    if (dominates(a, b, 0)) return "A dominates after transient";
    if (dominates(b, a, 0)) return "B dominates after transient";
    if (dominates(a, b, n / 2)) return "A dominates at large t";
    if (dominates(b, a, n / 2)) return "B dominates at large t";
    return "no dominance";
}

int cmd_compare(const ExperimentConfig& ca, const ExperimentConfig& cb, Streams s) {
    if (ca.t_final != cb.t_final) throw ConfigError("compare: t_final differs between A and B");
    if (ca.n_steps == 0 || cb.n_steps == 0) throw ConfigError("compare needs fixed n-steps");
    const Profile pa = ca.build_profile();
    const Profile pb = cb.build_profile();

    RunResult ra, rb;
    try {
        ra = run_trajectory(ca, pa, s.err);
        rb = run_trajectory(cb, pb, s.err);
    } catch (const Error& e) {
        s.err << "error: " << e.what() << '\n';
        return kSimulationError;
    }

    const auto& A = ra.traj.records;
    const auto& Bv = rb.traj.records;
    bool same_grid = A.size() == Bv.size();
    for (std::size_t i = 0; same_grid && i < A.size(); ++i) {
        same_grid = std::abs(A[i].t - Bv[i].t) <= 1e-12 * std::max(1.0, std::abs(A[i].t));
    }
    if (!same_grid) throw ConfigError("compare: record grids of A and B differ");

    const double window = std::max(pa.modulation_period(), pb.modulation_period());
    const Series avg_a = period_average(r_series(ra.traj), window);
    const Series avg_b = period_average(r_series(rb.traj), window);
    const std::string verdict = compare_verdict(avg_a, avg_b);

    with_output(ca.output, s.out, [&](std::ostream& os) {
        if (ca.format == OutputFormat::json) {
            nlohmann::ordered_json j;
            j["A"] = ra.traj.profile_descriptor;
            j["B"] = rb.traj.profile_descriptor;
            auto rows = nlohmann::ordered_json::array();
            for (std::size_t i = 0; i < A.size(); ++i) {
                rows.push_back({{"t", A[i].t}, {"r_a", A[i].r}, {"r_b", Bv[i].r}, {"diff", A[i].r - Bv[i].r}});
            }
            j["records"] = std::move(rows);
            j["average_window"] = window;
            j["verdict"] = verdict;
            os << j.dump(1) << '\n';
        } else {
            os << "t,r_a,r_b,diff\n";
            for (std::size_t i = 0; i < A.size(); ++i) {
                os << format_double(A[i].t) << ',' << format_double(A[i].r) << ',' << format_double(Bv[i].r) << ','
                   << format_double(A[i].r - Bv[i].r) << '\n';
            }
            os << "# verdict: " << verdict << '\n';
        }
    });
    s.err << "A: " << ra.traj.profile_descriptor << "\nB: " << rb.traj.profile_descriptor << "\nverdict: " << verdict
          << '\n';
    return std::max(check_norm(ra.traj, s.err), check_norm(rb.traj, s.err));
}

// Option wiring shared by all subcommands. Values are recorded in command-line
// order and applied on top of the preset and config file.
struct Overrides {
    KeyValues values;
    std::string config_file;
};

void add_common(CLI::App* sub, Overrides& ov) {
    auto opt = [&](const std::string& name, const std::string& help) {
        const std::string key = name;
        sub->add_option_function<std::string>(
            "--" + name, [&ov, key](const std::string& v) { ov.values.emplace_back(key, v); }, help);
    };
    auto flag = [&](const std::string& name, const std::string& help) {
        const std::string key = name;
        sub->add_flag_callback("--" + name, [&ov, key] { ov.values.emplace_back(key, "true"); }, help);
    };
    sub->add_option("--config", ov.config_file, "flat key = value config file");
    opt("preset", "fig1 | fig2 | fig3 | fig4 | fig5");
    opt("profile", "constant | relaxing_pulse | parametric_resonance | janszky_adam | sudden_jump | tabulated");
    opt("omega0", "reference frequency (default 1)");
    opt("B", "relaxing pulse width (accepts e.g. 3pi)");
    opt("epsilon", "parametric modulation rate");
    opt("omega-l", "parametric lower frequency");
    opt("omega1", "jump / Janszky-Adam high frequency");
    opt("hold-high", "Janszky-Adam hold at omega1");
    opt("hold-low", "Janszky-Adam hold at omega0");
    opt("table", "two-column (t, omega) file for the tabulated profile");
    opt("t-final", "end time");
    opt("n-steps", "ladder length or 'auto'");
    opt("tol", "convergence tolerance on r");
    opt("n-start", "first ladder length of a convergence study");
    opt("lambda", "quadrature angle");
    opt("scaling", "half | quarter");
    opt("record-every", "emit every k-th step or 'auto'");
    opt("sampling", "right | midpoint");
    opt("output", "output path (default stdout)");
    opt("format", "csv | json");
    opt("dt-sub", "oracle RK4 substep");
    opt("oracle-dim", "oracle Fock dimension");
    flag("oracle-check", "compare against the Fock-basis integrator");
    flag("fingerprint", "append re_z, im_z columns");
}

// Preset first, then the config file, then command-line values.
ExperimentConfig resolve(const Overrides& ov, const std::string& extra_config = {}) {
    ExperimentConfig cfg;
    KeyValues file_values;
    for (const auto& path : {extra_config, ov.config_file}) {
        if (path.empty()) continue;
        auto kv = parse_config_text(read_file(path));
        file_values.insert(file_values.end(), kv.begin(), kv.end());
    }
    auto apply_presets = [&](const KeyValues& kv) {
        for (const auto& [k, v] : kv) {
            if (k == "preset") cfg.set(k, v);
        }
    };
    apply_presets(file_values);
    apply_presets(ov.values);
    for (const auto& [k, v] : file_values) {
        if (k != "preset") cfg.set(k, v);
    }
    for (const auto& [k, v] : ov.values) {
        if (k != "preset") cfg.set(k, v);
    }
    return cfg;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Squeezing in time-dependent harmonic oscillators via su(1,1) propagator composition", "tdho"};
    app.require_subcommand(1);

    Overrides sim_ov, sweep_ov, conv_ov, cmp_ov;
    auto* sim = app.add_subcommand("simulate", "evolve one profile and write its trajectory");
    add_common(sim, sim_ov);

    auto* sweep = app.add_subcommand("sweep", "evolve one profile family over a list of parameter values");
    add_common(sweep, sweep_ov);
    SweepSpec spec;
    sweep->add_option("--param", spec.param, "parameter to vary (any config key)");
    sweep->add_option("--values", spec.values, "comma-separated values")->delimiter(',');

    auto* conv = app.add_subcommand("converge", "double N until r stops changing");
    add_common(conv, conv_ov);
    std::string trajectory_path;
    conv->add_option("--trajectory", trajectory_path, "also write the converged trajectory here");

    auto* cmp = app.add_subcommand("compare", "run two configs on a shared grid and compare r");
    add_common(cmp, cmp_ov);
    std::string config_a, config_b;
    cmp->add_option("--a", config_a, "config file for run A");
    cmp->add_option("--b", config_b, "config file for run B");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    const Streams s{out, err};
    try {
        if (sweep->parsed()) return cmd_sweep(resolve(sweep_ov), spec, s);

        if (cmp->parsed()) {
            ExperimentConfig ca, cb;
            if (config_a.empty() && config_b.empty()) {
                // Built-in comparison: Janszky-Adam against parametric resonance, both within [1, 1.04].
                ExperimentConfig base = resolve(cmp_ov);
                if (base.preset != "fig5") throw ConfigError("compare needs --a and --b, or --preset fig5");
                ca = base;
                cb = base;
                cb.profile = "parametric_resonance";
                cb.omega_l = 1.04;
                cb.epsilon = 2.04;
            } else {
                if (config_a.empty() || config_b.empty()) throw ConfigError("compare needs both --a and --b");
                ca = resolve(cmp_ov, config_a);
                cb = resolve(cmp_ov, config_b);
            }
            return cmd_compare(ca, cb, s);
        }

        Overrides& ov = sim->parsed() ? sim_ov : conv_ov;
        const ExperimentConfig cfg = resolve(ov);
        const Profile p = cfg.build_profile();
        try {
            if (sim->parsed()) return cmd_simulate(cfg, p, s);
            return cmd_converge(cfg, p, trajectory_path, s);
        } catch (const ConfigError&) {
            throw;
        } catch (const ProfileDomainError& e) {
            err << "error: " << e.what() << " (step index j = " << e.index() << ")\n";
            return kSimulationError;
        } catch (const SingularCompositionError& e) {
            err << "error: " << e.what() << " (step index j = " << e.step_index() << ")\n";
            return kSimulationError;
        } catch (const Error& e) {
            err << "error: " << e.what() << '\n';
            return kSimulationError;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        // Profile construction and file reading happen before any simulation.
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kSimulationError;
    }
}

}  // namespace tdho::cli
