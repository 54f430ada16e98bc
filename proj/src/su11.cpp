#include "tdho/su11.hpp"

#include <cmath>
#include <sstream>

namespace tdho {

namespace {

bool finite(const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

double PropagatorAccumulator::norm_defect() const {
    return std::abs(std::norm(alpha) + std::abs(beta) - 1.0);
}

StepCoeffs step_coeffs(double omega_j, double omega_0, double tau) {
    if (!(omega_j > 0.0) || !std::isfinite(omega_j)) {
        std::ostringstream os;
        os << "step_coeffs: frequency must be positive and finite, got " << omega_j;
        throw DomainError(os.str());
    }
    if (!(omega_0 > 0.0) || !std::isfinite(omega_0)) {
        throw DomainError("step_coeffs: reference frequency must be positive and finite");
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw DomainError("step_coeffs: step duration must be positive and finite");
    }

    const double rho = 0.5 * std::log(omega_j / omega_0);
    const double phase = omega_j * tau;
    const double c = std::cos(phase);
    const double s = std::sin(phase);
    const Complex denom{c, std::cosh(2.0 * rho) * s};
    const Complex lam_pm = Complex{0.0, -std::sinh(2.0 * rho) * s} / denom;

    StepCoeffs out;
    out.lam_plus = lam_pm;
    out.lam_minus = lam_pm;
    out.lam_c_root = 1.0 / denom;
    out.lam_c = 1.0 / (denom * denom);
    out.omega_j = omega_j;
    out.tau = tau;
    out.rho_j = rho;
    return out;
}

std::vector<StepCoeffs> step_ladder(std::span<const double> omegas, double omega_0, double tau) {
    std::vector<StepCoeffs> steps;
    steps.reserve(omegas.size());
    for (double w : omegas) steps.push_back(step_coeffs(w, omega_0, tau));
    return steps;
}

PropagatorAccumulator compose(const PropagatorAccumulator& acc, const StepCoeffs& step) {
    const Complex denom = 1.0 - acc.alpha * step.lam_minus;
    if (std::abs(denom) < kSingularDenominator) {
        std::ostringstream os;
        os << "compose: singular denominator |1 - alpha*L-| = " << std::abs(denom) << " at step "
           << acc.steps_applied + 1 << " (omega = " << step.omega_j << ")";
        throw SingularCompositionError(os.str(), acc.steps_applied + 1, step.omega_j);
    }
    const Complex inv = 1.0 / denom;

    PropagatorAccumulator out;
    out.alpha = step.lam_plus + acc.alpha * step.lam_c * inv;
    out.beta = acc.beta * step.lam_c * (inv * inv);
    out.gamma = acc.gamma + step.lam_minus * acc.beta * inv;
    out.beta_root = acc.beta_root * step.lam_c_root * inv;
    out.steps_applied = acc.steps_applied + 1;
    return out;
}

PropagatorAccumulator compose_all(std::span<const StepCoeffs> steps) {
    PropagatorAccumulator acc;
    for (const auto& s : steps) acc = compose(acc, s);
    return acc;
}

StepCoeffs as_step(const PropagatorAccumulator& acc) {
    StepCoeffs s;
    s.lam_plus = acc.alpha;
    s.lam_c = acc.beta;
    s.lam_minus = acc.gamma;
    s.lam_c_root = acc.beta_root;
    return s;
}

Complex alpha_via_gcf(std::span<const StepCoeffs> steps) {
    if (steps.empty()) throw NotEvaluableError("alpha_via_gcf: empty ladder");

    Complex a = steps.front().lam_plus;
    for (std::size_t j = 1; j < steps.size(); ++j) {
        if (a == Complex{0.0, 0.0}) {
            std::ostringstream os;
            os << "alpha_via_gcf: partial alpha vanishes below level " << j + 1;
            throw NotEvaluableError(os.str());
        }
        const StepCoeffs& s = steps[j];
        // Lambda_- - 1/a = -(1 - a Lambda_-)/a; reject the same degeneracy compose does.
        if (std::abs(1.0 - a * s.lam_minus) < kSingularDenominator) {
            std::ostringstream os;
            os << "alpha_via_gcf: vanishing denominator at level " << j + 1;
            throw NotEvaluableError(os.str());
        }
        const Complex inner = s.lam_minus - 1.0 / a;
        a = s.lam_plus - s.lam_c / inner;
        if (!finite(a)) throw NotEvaluableError("alpha_via_gcf: non-finite partial value");
    }
    return a;
}

}  // namespace tdho
