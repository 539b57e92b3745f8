#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace soclimit {

/// Invalid user-supplied configuration (unknown key, bad value, missing key).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A check was requested on data that violates the hypotheses of the
/// inequality being checked (e.g. tau/h^2 above the admissible bound).
class HypothesisViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A time stepper produced a non-finite state.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(std::size_t step, const std::string& what)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace soclimit
