#include "tdho/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace tdho {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << "profile parameter " << name << " must be positive and finite, got " << v;
        throw DomainError(os.str());
    }
}

void validate(const Profile::Params& params) {
    std::visit(overloaded{
                   [](const ConstantProfile&) {},
                   [](const RelaxingPulse& p) { require_positive(p.B, "B"); },
                   [](const ParametricResonance& p) {
                       require_positive(p.omega_l, "omega_l");
                       require_positive(p.epsilon, "epsilon");
                   },
                   [](const JanszkyAdam& p) {
                       require_positive(p.omega_1, "omega_1");
                       require_positive(p.hold_high, "hold_high");
                       require_positive(p.hold_low, "hold_low");
                   },
                   [](const SuddenJump& p) { require_positive(p.omega_1, "omega_1"); },
                   [](const TabulatedProfile& p) {
                       if (p.t.size() != p.omega.size() || p.t.size() < 2) {
                           throw DomainError("tabulated profile needs at least two (t, omega) rows");
                       }
                       for (std::size_t i = 1; i < p.t.size(); ++i) {
                           if (!(p.t[i] > p.t[i - 1])) {
                               throw DomainError("tabulated profile times must be strictly increasing");
                           }
                       }
                   },
               },
               params);
}

double interpolate(const TabulatedProfile& tab, double t) {
    // j * tau can land a few ulps past t_final; such points read the last row.
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(tab.t.back());
    if (t > tab.t.back() && t <= tab.t.back() + slack) return tab.omega.back();
    if (t < tab.t.front() || t > tab.t.back()) {
        std::ostringstream os;
        os << "tabulated profile queried at t = " << t << " outside [" << tab.t.front() << ", "
           << tab.t.back() << "]";
        throw RangeError(os.str());
    }
    auto hi = std::lower_bound(tab.t.begin(), tab.t.end(), t);
    const auto i = static_cast<std::size_t>(hi - tab.t.begin());
    if (tab.t[i] == t) return tab.omega[i];
    const double t0 = tab.t[i - 1], t1 = tab.t[i];
    const double w = (t - t0) / (t1 - t0);
    return tab.omega[i - 1] + w * (tab.omega[i] - tab.omega[i - 1]);
}

}  // namespace

Profile::Profile(Params params, double omega_0) : params_(std::move(params)), omega_0_(omega_0) {
    require_positive(omega_0, "omega_0");
    validate(params_);
}

Profile Profile::constant(double omega_0) { return Profile(ConstantProfile{}, omega_0); }

Profile Profile::relaxing_pulse(double B, double omega_0) { return Profile(RelaxingPulse{B}, omega_0); }

Profile Profile::parametric_resonance(double omega_l, double epsilon, double omega_0) {
    return Profile(ParametricResonance{omega_l, epsilon}, omega_0);
}

Profile Profile::janszky_adam(double omega_1, double omega_0) {
    require_positive(omega_1, "omega_1");
    require_positive(omega_0, "omega_0");
    return janszky_adam(omega_1, std::numbers::pi / (2.0 * omega_1), std::numbers::pi / (2.0 * omega_0),
                        omega_0);
}

Profile Profile::janszky_adam(double omega_1, double hold_high, double hold_low, double omega_0) {
    return Profile(JanszkyAdam{omega_1, hold_high, hold_low}, omega_0);
}

Profile Profile::sudden_jump(double omega_1, double omega_0) { return Profile(SuddenJump{omega_1}, omega_0); }

Profile Profile::tabulated(std::vector<double> t, std::vector<double> omega, double omega_0) {
    return Profile(TabulatedProfile{std::move(t), std::move(omega)}, omega_0);
}

ProfileKind Profile::kind() const {
    return std::visit(overloaded{
                          [](const ConstantProfile&) { return ProfileKind::constant; },
                          [](const RelaxingPulse&) { return ProfileKind::relaxing_pulse; },
                          [](const ParametricResonance&) { return ProfileKind::parametric_resonance; },
                          [](const JanszkyAdam&) { return ProfileKind::janszky_adam; },
                          [](const SuddenJump&) { return ProfileKind::sudden_jump; },
                          [](const TabulatedProfile&) { return ProfileKind::tabulated; },
                      },
                      params_);
}

double Profile::modulation_period() const {
    if (const auto* pr = std::get_if<ParametricResonance>(&params_)) {
        return 2.0 * std::numbers::pi / (pr->epsilon * omega_0_);
    }
    if (const auto* ja = std::get_if<JanszkyAdam>(&params_)) return ja->hold_high + ja->hold_low;
    return 0.0;
}

std::string to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::constant: return "constant";
        case ProfileKind::relaxing_pulse: return "relaxing_pulse";
        case ProfileKind::parametric_resonance: return "parametric_resonance";
        case ProfileKind::janszky_adam: return "janszky_adam";
        case ProfileKind::sudden_jump: return "sudden_jump";
        case ProfileKind::tabulated: return "tabulated";
    }
    return "unknown";
}

std::string Profile::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(kind()) << "(omega_0=" << omega_0_;
    std::visit(overloaded{
                   [](const ConstantProfile&) {},
                   [&](const RelaxingPulse& p) { os << ",B=" << p.B; },
                   [&](const ParametricResonance& p) { os << ",omega_l=" << p.omega_l << ",epsilon=" << p.epsilon; },
                   [&](const JanszkyAdam& p) {
                       os << ",omega_1=" << p.omega_1 << ",hold_high=" << p.hold_high << ",hold_low=" << p.hold_low;
                   },
                   [&](const SuddenJump& p) { os << ",omega_1=" << p.omega_1; },
                   [&](const TabulatedProfile& p) { os << ",rows=" << p.t.size(); },
               },
               params_);
    os << ")";
    return os.str();
}

double eval_profile(const Profile& p, double t) {
    const double w0 = p.omega_0();
    if (t <= 0.0) return w0;
    return std::visit(overloaded{
                          [&](const ConstantProfile&) { return w0; },
                          [&](const RelaxingPulse& r) {
                              return w0 * (1.0 + 0.5 * w0 * t * std::exp(-w0 * t / r.B));
                          },
                          [&](const ParametricResonance& r) {
                              return 0.5 * ((w0 + r.omega_l) + (w0 - r.omega_l) * std::cos(r.epsilon * w0 * t));
                          },
                          [&](const JanszkyAdam& r) {
                              const double period = r.hold_high + r.hold_low;
                              double phase = std::fmod(t, period);
                              // Right-closed intervals: a multiple of the period closes a low hold.
                              if (phase == 0.0) phase = period;
                              return phase <= r.hold_high ? r.omega_1 : w0;
                          },
                          [&](const SuddenJump& r) { return r.omega_1; },
                          [&](const TabulatedProfile& r) { return interpolate(r, t); },
                      },
                      p.params());
}

DiscretizedProfile discretize(const Profile& p, double t_final, std::size_t n_steps, SamplingRule rule) {
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw DomainError("discretize: t_final must be positive");
    if (n_steps < 1) throw DomainError("discretize: n_steps must be at least 1");

    DiscretizedProfile d;
    d.omega_0 = p.omega_0();
    d.t_final = t_final;
    d.tau = t_final / static_cast<double>(n_steps);
    d.samples.resize(n_steps);
    const double offset = rule == SamplingRule::midpoint ? 0.5 : 0.0;
    for (std::size_t j = 1; j <= n_steps; ++j) {
        const double t = (static_cast<double>(j) - offset) * d.tau;
        const double w = eval_profile(p, t);
        if (!(w > 0.0) || !std::isfinite(w)) {
            std::ostringstream os;
            os << "discretize: non-positive frequency " << w << " at step j = " << j << " (t = " << t << ")";
            throw ProfileDomainError(os.str(), j);
        }
        d.samples[j - 1] = w;
    }
    return d;
}

TabulatedProfile parse_tabulated(const std::string& text) {
    TabulatedProfile tab;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        double t = 0.0, w = 0.0;
        if (!(fields >> t)) {
            if (line.find_first_not_of(" \t\r,") == std::string::npos) continue;
            throw DomainError("tabulated profile: unparseable line " + std::to_string(lineno));
        }
        if (fields.peek() == ',') fields.get();
        if (!(fields >> w)) throw DomainError("tabulated profile: missing omega on line " + std::to_string(lineno));
        std::string rest;
        if (fields >> rest) throw DomainError("tabulated profile: extra column on line " + std::to_string(lineno));
        tab.t.push_back(t);
        tab.omega.push_back(w);
    }
    validate(tab);
    return tab;
}

TabulatedProfile read_tabulated(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open tabulated profile " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_tabulated(buf.str());
}

}  // namespace tdho
