#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace volalab {

/// Bad parameter values, malformed data, or violated preconditions.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A closed-form result was requested outside the hypotheses under which it holds.
class NotApplicable : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Volatility filter produced a zero or infinite sigma at some step.
class NumericDegeneracy : public std::runtime_error {
public:
    NumericDegeneracy(const std::string& what, std::size_t step);
    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Generative recursion left the |log sigma^2| <= 700 band.
class SimulationExplosion : public std::runtime_error {
public:
    SimulationExplosion(const std::string& what, std::size_t step);
    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Matrix size guard for Kronecker powers and companion systems.
class SizeLimitExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Asymptotic covariance requested from a (near-)singular information matrix.
class IllConditioned : public std::runtime_error {
public:
    IllConditioned(const std::string& what, double condition_number);
    [[nodiscard]] double condition_number() const noexcept { return cond_; }

private:
    double cond_;
};

} // namespace volalab
