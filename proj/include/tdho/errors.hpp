#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tdho {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-positive frequency, duration or similar out-of-domain argument.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Degenerate denominator 1 - alpha * L- during composition.
class SingularCompositionError : public Error {
public:
    SingularCompositionError(const std::string& what, std::size_t step_index, double omega)
        : Error(what), step_index_(step_index), omega_(omega) {}

    // 1-based index of the offending step; 0 when unknown.
    [[nodiscard]] std::size_t step_index() const noexcept { return step_index_; }
    [[nodiscard]] double omega() const noexcept { return omega_; }

private:
    std::size_t step_index_;
    double omega_;
};

class NotEvaluableError : public Error {
public:
    using Error::Error;
};

/// Lookup outside a tabulated profile's range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// A frequency sample that is not strictly positive.
class ProfileDomainError : public Error {
public:
    ProfileDomainError(const std::string& what, std::size_t index)
        : Error(what), index_(index) {}

    // 1-based step index j of the first offending sample.
    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// |alpha| >= 1: the accumulator no longer describes a normalizable state.
class InvalidAccumulatorError : public Error {
public:
    using Error::Error;
};

/// Probability leaked past the retained Fock levels exceeds the threshold.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, double leakage)
        : Error(what), leakage_(leakage) {}

    [[nodiscard]] double leakage() const noexcept { return leakage_; }

private:
    double leakage_;
};

}  // namespace tdho
