#include "tdho/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "tdho/simd/kernels.hpp"

namespace tdho {

double quadrature_variance(double r, double phi, double lambda, VarianceScaling scaling) {
    const double angle = lambda - 0.5 * phi;
    const double s = std::sin(angle);
    const double c = std::cos(angle);
    return scale_factor(scaling) * (std::exp(2.0 * r) * s * s + std::exp(-2.0 * r) * c * c);
}

SqueezeObservables observables_from_accumulator(const PropagatorAccumulator& acc, double t, double lambda,
                                                VarianceScaling scaling) {
    const double mod = std::abs(acc.alpha);
    if (!(mod < 1.0)) {
        std::ostringstream os;
        os << "accumulator has |alpha| = " << mod << " >= 1 at t = " << t;
        throw InvalidAccumulatorError(os.str());
    }
    SqueezeObservables o;
    o.t = t;
    o.alpha = acc.alpha;
    o.r = std::atanh(mod);
    o.vartheta = std::arg(acc.alpha);
    o.phi = o.vartheta + std::numbers::pi;
    if (o.phi > std::numbers::pi) o.phi -= 2.0 * std::numbers::pi;
    o.chi = std::arg(acc.beta);
    o.variance = quadrature_variance(o.r, o.phi, lambda, scaling);
    const double sh = std::sinh(o.r);
    o.mean_n = sh * sh;
    o.norm_defect = acc.norm_defect();
    return o;
}

std::size_t auto_record_every(std::size_t n_steps) { return std::max<std::size_t>(1, n_steps / 5000); }

Trajectory evolve(const DiscretizedProfile& profile, const EvolveOptions& options, std::string descriptor) {
    const std::size_t n = profile.n_steps();
    const std::size_t every = options.record_every ? options.record_every : auto_record_every(n);

    Trajectory traj;
    traj.profile_descriptor = std::move(descriptor);
    traj.n_steps_used = n;
    traj.record_every = every;
    traj.tau = profile.tau;
    traj.records.reserve(n / every + 1);

    PropagatorAccumulator acc;
    StepCoeffs step;
    double last_omega = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = 1; j <= n; ++j) {
        const double w = profile.samples[j - 1];
        if (w != last_omega) {
            step = step_coeffs(w, profile.omega_0, profile.tau);
            last_omega = w;
        }
        acc = compose(acc, step);
        if (j % every == 0 || j == n) {
            auto obs = observables_from_accumulator(acc, static_cast<double>(j) * profile.tau, options.lambda,
                                                    options.scaling);
            obs.omega = w;
            traj.records.push_back(obs);
        }
    }
    traj.final_state = acc;
    return traj;
}

namespace {

// Folds up to kLanes ladders of identical length through the batch kernel.
std::vector<Trajectory> evolve_lanes(std::vector<const DiscretizedProfile*> lanes, const EvolveOptions& options,
                                     std::vector<std::string> names) {
    using simd::kLanes;
    const std::size_t count = lanes.size();
    const std::size_t n = lanes.front()->n_steps();
    const std::size_t every = options.record_every ? options.record_every : auto_record_every(n);
    const auto& kernels = simd::active_kernels();

    std::vector<Trajectory> out(count);
    for (std::size_t l = 0; l < count; ++l) {
        out[l].profile_descriptor = names[l];
        out[l].n_steps_used = n;
        out[l].record_every = every;
        out[l].tau = lanes[l]->tau;
        out[l].records.reserve(n / every + 1);
    }

    std::vector<double> plus_re(every * kLanes), plus_im(every * kLanes), c_re(every * kLanes, 1.0),
        c_im(every * kLanes), root_re(every * kLanes, 1.0), root_im(every * kLanes);
    std::vector<StepCoeffs> cached(count);
    std::vector<double> cached_omega(count, std::numeric_limits<double>::quiet_NaN());

    simd::BatchState state;
    for (std::size_t j0 = 0; j0 < n; j0 += every) {
        const std::size_t len = std::min(every, n - j0);
        for (std::size_t k = 0; k < len; ++k) {
            for (std::size_t l = 0; l < count; ++l) {
                const DiscretizedProfile& p = *lanes[l];
                const double w = p.samples[j0 + k];
                if (w != cached_omega[l]) {
                    cached[l] = step_coeffs(w, p.omega_0, p.tau);
                    cached_omega[l] = w;
                }
                const std::size_t idx = k * kLanes + l;
                plus_re[idx] = cached[l].lam_plus.real();
                plus_im[idx] = cached[l].lam_plus.imag();
                c_re[idx] = cached[l].lam_c.real();
                c_im[idx] = cached[l].lam_c.imag();
                root_re[idx] = cached[l].lam_c_root.real();
                root_im[idx] = cached[l].lam_c_root.imag();
            }
        }
        const simd::BatchSteps steps{plus_re.data(), plus_im.data(), c_re.data(), c_im.data(),
                                     root_re.data(), root_im.data(), len};
        if (!kernels.compose_batch(state, steps)) {
            // Re-run on the reference path, which reports the offending step.
            for (std::size_t l = 0; l < count; ++l) out[l] = evolve(*lanes[l], options, names[l]);
            return out;
        }
        const std::size_t j1 = j0 + len;
        for (std::size_t l = 0; l < count; ++l) {
            PropagatorAccumulator acc;
            acc.alpha = {state.a_re[l], state.a_im[l]};
            acc.beta = {state.b_re[l], state.b_im[l]};
            acc.gamma = {state.g_re[l], state.g_im[l]};
            acc.beta_root = {state.s_re[l], state.s_im[l]};
            acc.steps_applied = j1;
            auto obs = observables_from_accumulator(acc, static_cast<double>(j1) * lanes[l]->tau, options.lambda,
                                                    options.scaling);
            obs.omega = lanes[l]->samples[j1 - 1];
            out[l].records.push_back(obs);
            out[l].final_state = acc;
        }
    }
    return out;
}

}  // namespace

std::vector<Trajectory> evolve_many(std::span<const DiscretizedProfile> profiles, const EvolveOptions& options,
                                    std::span<const std::string> descriptors) {
    std::vector<Trajectory> result(profiles.size());
    std::map<std::size_t, std::vector<std::size_t>> by_length;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        if (profiles[i].n_steps() == 0) throw DomainError("evolve_many: empty ladder");
        by_length[profiles[i].n_steps()].push_back(i);
    }

    struct Job {
        std::vector<std::size_t> members;
        std::future<std::vector<Trajectory>> done;
    };
    std::vector<Job> jobs;
    for (auto& [len, members] : by_length) {
        for (std::size_t start = 0; start < members.size(); start += simd::kLanes) {
            Job job;
            std::vector<const DiscretizedProfile*> lanes;
            std::vector<std::string> names;
            for (std::size_t k = start; k < std::min(members.size(), start + simd::kLanes); ++k) {
                job.members.push_back(members[k]);
                lanes.push_back(&profiles[members[k]]);
                names.push_back(members[k] < descriptors.size() ? descriptors[members[k]] : std::string{});
            }
            job.done = std::async(std::launch::async, evolve_lanes, std::move(lanes), options, std::move(names));
            jobs.push_back(std::move(job));
        }
    }
    for (auto& job : jobs) {
        auto trajs = job.done.get();
        for (std::size_t k = 0; k < job.members.size(); ++k) result[job.members[k]] = std::move(trajs[k]);
    }
    return result;
}

FockState FockState::number_state(std::size_t n, std::size_t n_max) {
    if (n > n_max) throw DomainError("number_state: level exceeds n_max");
    std::vector<Complex> a(n_max + 1);
    a[n] = 1.0;
    return FockState(std::move(a));
}

double FockState::norm_squared() const {
    double s = 0.0;
    for (const auto& c : amplitudes) s += std::norm(c);
    return s;
}

FockState fock_amplitudes(const PropagatorAccumulator& acc, std::size_t n_max) {
    if (n_max % 2 != 0) throw DomainError("fock_amplitudes: n_max must be even");
    if (!(std::abs(acc.alpha) < 1.0)) throw InvalidAccumulatorError("fock_amplitudes: |alpha| >= 1");

    std::vector<Complex> c(n_max + 1);
    const Complex half_alpha = 0.5 * acc.alpha;
    c[0] = std::pow(std::abs(acc.beta), 0.25);
    for (std::size_t m = 1; 2 * m <= n_max; ++m) {
        const double k = static_cast<double>(m);
        c[2 * m] = c[2 * m - 2] * half_alpha * (std::sqrt(2.0 * k * (2.0 * k - 1.0)) / k);
    }
    return FockState(std::move(c));
}

FockState apply_to_state(const PropagatorAccumulator& acc, const FockState& initial, std::size_t n_max) {
    if (initial.amplitudes.empty()) throw DomainError("apply_to_state: empty initial state");
    if (std::abs(initial.norm_squared() - 1.0) > 1e-9) throw DomainError("apply_to_state: initial state is not normalized");
    if (n_max < initial.n_max()) throw DomainError("apply_to_state: n_max below the initial state's support");

    const std::size_t m_in = initial.n_max();

    // exp(gamma K-): K-|m> = 1/2 sqrt(m(m-1)) |m-2>, a finite series per level.
    std::vector<Complex> lowered(m_in + 1);
    for (std::size_t m = 0; m <= m_in; ++m) {
        Complex term = initial.amplitudes[m];
        if (term == Complex{}) continue;
        lowered[m] += term;
        for (std::size_t k = 1, level = m; level >= 2; ++k, level -= 2) {
            const double l = static_cast<double>(level);
            term *= acc.gamma * (0.5 * std::sqrt(l * (l - 1.0)) / static_cast<double>(k));
            lowered[level - 2] += term;
        }
    }

    // exp(ln(beta) Kc): Kc|n> = 1/2 (n + 1/2) |n>, so |n> picks up beta^{n/2 + 1/4}.
    Complex weight = std::sqrt(acc.beta_root);
    for (std::size_t m = 0; m <= m_in; ++m) {
        lowered[m] *= weight;
        weight *= acc.beta_root;
    }

    // exp(alpha K+): K+|m> = 1/2 sqrt((m+1)(m+2)) |m+2>, cut at n_max.
    std::vector<Complex> out(n_max + 1);
    for (std::size_t m = 0; m <= m_in; ++m) {
        Complex term = lowered[m];
        if (term == Complex{}) continue;
        out[m] += term;
        for (std::size_t k = 1, level = m; level + 2 <= n_max; ++k, level += 2) {
            const double l = static_cast<double>(level);
            term *= acc.alpha * (0.5 * std::sqrt((l + 1.0) * (l + 2.0)) / static_cast<double>(k));
            out[level + 2] += term;
        }
    }

    FockState result(std::move(out));
    const double leakage = 1.0 - result.norm_squared();
    if (leakage > kMaxStateLeakage) {
        std::ostringstream os;
        os << "apply_to_state: truncation at n_max = " << n_max << " leaks " << leakage;
        throw TruncationError(os.str(), leakage);
    }
    return result;
}

ConvergenceResult auto_converge(const Profile& p, double t_final, double tol, std::size_t n_start,
                                const ConvergeOptions& options) {
    if (!(tol > 0.0)) throw DomainError("auto_converge: tol must be positive");
    if (n_start < 100) throw DomainError("auto_converge: n_start must be at least 100");

    // Record spacing that divides n_start, so that every doubling shares the grid.
    std::size_t every0 = std::max<std::size_t>(1, n_start / std::max<std::size_t>(1, options.grid_points));
    while (n_start % every0 != 0) --every0;

    const std::string name = p.describe();
    auto run = [&](std::size_t n, std::size_t every) {
        EvolveOptions eo;
        eo.record_every = every;
        eo.lambda = options.lambda;
        eo.scaling = options.scaling;
        return evolve(discretize(p, t_final, n, options.sampling), eo, name);
    };

    ConvergenceResult res;
    std::size_t n = n_start, every = every0;
    Trajectory prev = run(n, every);
    res.history.push_back({n, std::numeric_limits<double>::quiet_NaN()});

    while (true) {
        if (n > options.cap / 2) {
            std::ostringstream os;
            os << "auto_converge: cap of " << options.cap << " steps reached at N = " << n
               << " without meeting tol = " << tol;
            res.warning = os.str();
            res.converged = false;
            prev.converged = false;
            res.trajectory = std::move(prev);
            return res;
        }
        n *= 2;
        every *= 2;
        Trajectory next = run(n, every);
        double max_dr = 0.0;
        for (std::size_t i = 0; i < std::min(prev.records.size(), next.records.size()); ++i) {
            max_dr = std::max(max_dr, std::abs(next.records[i].r - prev.records[i].r));
        }
        res.history.push_back({n, max_dr});
        if (max_dr < tol) {
            next.converged = true;
            res.converged = true;
            res.trajectory = std::move(next);
            return res;
        }
        prev = std::move(next);
    }
}

}  // namespace tdho
